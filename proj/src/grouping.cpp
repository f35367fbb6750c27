#include "ffrg/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ffrg/errors.hpp"

namespace ffrg {

void GroupingConfig::validate() const {
    if (!(eps_scale > 0)) throw ConfigError("eps_scale must be positive");
    if (!(vertical_penalty >= 1)) throw ConfigError("vertical_penalty must be >= 1");
    if (min_pts != 1) throw ConfigError("min_pts is fixed to 1");
}

double word_distance(const Word& a, const Word& b, double vertical_penalty) {
    double gap = 0;
    if (a.box.x1 < b.box.x0) gap = b.box.x0 - a.box.x1;
    else if (b.box.x1 < a.box.x0) gap = a.box.x0 - b.box.x1;
    return std::hypot(gap, vertical_penalty * std::abs(a.box.cy() - b.box.cy()));
}

double median_word_height(const Document& doc) {
    if (doc.words.empty()) return 0;
    std::vector<double> h;
    h.reserve(doc.words.size());
    for (const auto& w : doc.words) h.push_back(w.box.height());
    std::sort(h.begin(), h.end());
    const size_t n = h.size();
    return n % 2 ? h[n / 2] : 0.5 * (h[n / 2 - 1] + h[n / 2]);
}

std::vector<Phrase> group_words(const Document& doc, const GroupingConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(doc.words.size());
    if (n == 0) return {};

    const double eps = cfg.eps_scale * median_word_height(doc);
    auto neighbors = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if (word_distance(doc.words[i], doc.words[j], cfg.vertical_penalty) <= eps) out.push_back(j);
        return out;
    };

    constexpr int unvisited = -2;
    constexpr int noise = -1;
    std::vector<int> cluster(n, unvisited);
    int next_cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (cluster[i] != unvisited) continue;
        auto seeds = neighbors(i);
        if (static_cast<int>(seeds.size()) < cfg.min_pts) {
            cluster[i] = noise;
            continue;
        }
        const int c = next_cluster++;
        cluster[i] = c;
        std::deque<int> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            int q = queue.front();
            queue.pop_front();
            if (cluster[q] == noise) cluster[q] = c; // border point
            if (cluster[q] != unvisited) continue;
            cluster[q] = c;
            auto more = neighbors(q);
            if (static_cast<int>(more.size()) >= cfg.min_pts) queue.insert(queue.end(), more.begin(), more.end());
        }
    }

    const auto order = reading_order(doc);
    std::vector<std::vector<int>> members(next_cluster);
    for (int id : order)
        if (cluster[id] >= 0) members[cluster[id]].push_back(id);

    std::vector<Phrase> phrases;
    phrases.reserve(members.size());
    for (auto& ids : members) phrases.push_back(make_phrase(doc, std::move(ids)));

    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[order[i]] = i;
    std::sort(phrases.begin(), phrases.end(), [&](const Phrase& a, const Phrase& b) {
        return rank[a.word_ids.front()] < rank[b.word_ids.front()];
    });
    return phrases;
}

Document with_phrases(Document doc, const GroupingConfig& cfg) {
    doc.phrases = group_words(doc, cfg);
    return doc;
}

std::vector<int> phrase_of_word(const Document& doc, const std::vector<Phrase>& phrases) {
    std::vector<int> out(doc.words.size(), -1);
    for (size_t p = 0; p < phrases.size(); ++p)
        for (int id : phrases[p].word_ids) out[id] = static_cast<int>(p);
    return out;
}

} // namespace ffrg
