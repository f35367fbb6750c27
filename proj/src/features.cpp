#include "ffrg/features.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "ffrg/grouping.hpp"
#include "ffrg/typer.hpp"

namespace ffrg {

namespace features {

Bucket hash_trigram(std::string_view trigram) {
    std::uint64_t h = 14695981039346656037ull ^ kHashSeed;
    for (unsigned char c : trigram) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= h >> 33; // fold high bits so the modulus sees them
    return {static_cast<int>(h % kHashDim), ((h >> 40) & 1u) ? 1.0 : -1.0};
}

} // namespace features

namespace {

using namespace features;

void word_block(const Word& w, DataTypeSet phrase_type, double* out) {
    std::string padded = "^";
    for (unsigned char c : w.text) padded.push_back(static_cast<char>(std::tolower(c)));
    padded.push_back('$');
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
        auto b = hash_trigram(std::string_view(padded).substr(i, 3));
        out[b.index] += b.sign;
    }

    double* flags = out + kFlagOffset;
    int alpha = 0, upper = 0, lower = 0, digit = 0, punct = 0;
    for (unsigned char c : w.text) {
        if (std::isalpha(c)) {
            ++alpha;
            if (std::isupper(c)) ++upper;
            else ++lower;
        } else if (std::isdigit(c)) {
            ++digit;
        } else if (!std::isspace(c)) {
            ++punct;
        }
    }
    const double len = static_cast<double>(w.text.size());
    flags[0] = alpha > 0 && upper == alpha;
    flags[1] = alpha > 1 && std::isupper(static_cast<unsigned char>(w.text[0])) && upper == 1;
    flags[2] = alpha > 0 && lower == alpha;
    flags[3] = digit > 0;
    flags[4] = digit / len;
    flags[5] = alpha / len;
    flags[6] = punct / len;
    flags[7] = phrase_type.contains(DataType::money);
    flags[8] = phrase_type.contains(DataType::date);
    flags[9] = phrase_type.contains(DataType::number);
    flags[10] = phrase_type.contains(DataType::other);
    const size_t n = w.text.size();
    flags[11] = n <= 2;
    flags[12] = n >= 3 && n <= 5;
    flags[13] = n >= 6 && n <= 9;
    flags[14] = n >= 10;
    flags[15] = w.text.back() == ':';

    double* geo = out + kGeometryOffset;
    geo[0] = w.box.cx();
    geo[1] = w.box.cy();
    geo[2] = w.box.width();
    geo[3] = w.box.height();
}

} // namespace

Matrix featurize(const Document& doc) {
    const int n = static_cast<int>(doc.words.size());
    Matrix x = Matrix::Zero(n, kDim);
    if (n == 0) return x;

    const auto phrases = doc.phrases ? *doc.phrases : group_words(doc);
    const auto owner = phrase_of_word(doc, phrases);
    std::vector<DataTypeSet> ptype(phrases.size());
    for (size_t p = 0; p < phrases.size(); ++p) ptype[p] = type_of(phrases[p].text);

    for (int i = 0; i < n; ++i) {
        DataTypeSet t = owner[i] >= 0 ? ptype[owner[i]] : type_of(doc.words[i].text);
        word_block(doc.words[i], t, x.row(i).data());
    }

    const auto order = reading_order(doc);
    const double r2 = kContextRadius * kContextRadius;
    for (int i = 0; i < n; ++i) {
        const BBox& bi = doc.words[i].box;
        int count = 0;
        auto ctx = x.row(i).segment(kContextOffset, kContextDim);
        for (int j : order) {
            if (j == i) continue;
            const BBox& bj = doc.words[j].box;
            const double dx = bi.cx() - bj.cx();
            const double dy = bi.cy() - bj.cy();
            if (dx * dx + dy * dy > r2) continue;
            ctx += x.row(j).head(kWordDim);
            ++count;
        }
        if (count) ctx /= count;
    }
    return x;
}

} // namespace ffrg
