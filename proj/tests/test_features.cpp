#include <doctest.h>

#include <numeric>
#include <random>

#include "ffrg/features.hpp"
#include "helpers.hpp"

using namespace ffrg;

TEST_CASE("feature layout") {
    CHECK(features::kDim == 552);
    auto d = testing::line_doc({"Invoice", "#", "INV-1002"});
    const auto x = featurize(d);
    CHECK(x.rows() == 3);
    CHECK(x.cols() == 552);
    CHECK(x.allFinite());
    CHECK(featurize(Document{}).rows() == 0);

    // geometry block
    const auto& b = d.words[2].box;
    CHECK(x(2, features::kGeometryOffset + 0) == b.cx());
    CHECK(x(2, features::kGeometryOffset + 1) == b.cy());
    CHECK(x(2, features::kGeometryOffset + 2) == b.width());
    CHECK(x(2, features::kGeometryOffset + 3) == b.height());

    // "INV-1002" padded to 10 chars gives 8 signed trigram hits
    double l1 = 0, sum = 0;
    for (int c = 0; c < features::kHashDim; ++c) {
        l1 += std::abs(x(2, c));
        sum += x(2, c);
    }
    CHECK(l1 <= 8);
    CHECK(static_cast<int>(std::abs(sum)) % 2 == 0); // 8 unit hits of either sign
}

TEST_CASE("hash_trigram is stable") {
    const auto a = features::hash_trigram("inv");
    const auto b = features::hash_trigram("inv");
    CHECK(a.index == b.index);
    CHECK(a.sign == b.sign);
    CHECK(a.index >= 0);
    CHECK(a.index < features::kHashDim);
    CHECK((a.sign == 1.0 || a.sign == -1.0));
}

TEST_CASE("featurize is deterministic") {
    std::mt19937_64 rng(2);
    const auto d = testing::random_doc(rng, 25);
    const auto a = featurize(d);
    const auto b = featurize(d);
    CHECK(a == b);
}

TEST_CASE("isolated word has an empty context block") {
    Document d;
    d.words = {testing::word(0, "alone", 0.05, 0.05, 0.1, 0.06), testing::word(1, "far", 0.8, 0.9, 0.85, 0.91)};
    const auto x = featurize(d);
    CHECK(x.row(0).segment(features::kContextOffset, features::kContextDim).isZero(0));
    CHECK(x.row(1).segment(features::kContextOffset, features::kContextDim).isZero(0));
}

TEST_CASE("context block is the mean of neighbors' word blocks") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const auto d = testing::random_doc(rng, 40);
        const auto x = featurize(d);
        for (int i = 0; i < 40; ++i) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(features::kWordDim);
            int count = 0;
            for (int j = 0; j < 40; ++j) {
                if (j == i) continue;
                const double dx = d.words[i].box.cx() - d.words[j].box.cx();
                const double dy = d.words[i].box.cy() - d.words[j].box.cy();
                if (std::hypot(dx, dy) <= features::kContextRadius) {
                    sum += x.row(j).head(features::kWordDim);
                    ++count;
                }
            }
            if (count) sum /= count;
            const Eigen::RowVectorXd ctx = x.row(i).segment(features::kContextOffset, features::kContextDim);
            CHECK((ctx - sum).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("features follow the words under permutation") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        const auto d = testing::random_doc(rng, 30);
        std::vector<int> perm(30);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto a = featurize(d);
        const auto b = featurize(testing::permuted(d, perm));
        for (int i = 0; i < 30; ++i) REQUIRE(b.row(i) == a.row(perm[i]));
    }
}
