#include "ffrg/typer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>

#include "ffrg/errors.hpp"

namespace ffrg {

namespace {

const std::string kCurrency = R"((?:\$|€|£|¥|usd|eur|gbp|cad|aud))";
const std::string kGrouped = R"(\d{1,3}(?:,\d{3})+(?:\.\d{1,2})?)";
const std::string kCents = R"(\d+\.\d{2})";
const std::string kAnyAmount = "(?:" + kGrouped + "|" + kCents + R"(|\d+(?:\.\d+)?))";
const std::string kStrictAmount = "(?:" + kGrouped + "|" + kCents + ")";
const std::string kMonth =
    R"((?:january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec)\.?)";
const std::string kDay = R"(\d{1,2}(?:st|nd|rd|th)?)";

struct Rules {
    std::regex money_marked{"^" + kCurrency + R"(\s?-?)" + kAnyAmount + R"((?:\s?)" + kCurrency + ")?$"};
    std::regex money_suffixed{"^-?" + kAnyAmount + R"(\s?)" + kCurrency + "$"};
    std::regex money_bare{"^-?" + kStrictAmount + "$"};

    std::regex date_dmy{R"(^\d{1,2}[/.\-]\d{1,2}[/.\-](?:\d{4}|\d{2})$)"};
    std::regex date_iso{R"(^\d{4}[/.\-]\d{1,2}[/.\-]\d{1,2}$)"};
    std::regex date_month_first{"^" + kMonth + R"(\s+)" + kDay + R"(,?\s+\d{4}$)"};
    std::regex date_day_first{"^" + kDay + R"(\s+)" + kMonth + R"(,?\s+\d{4}$)"};
    std::regex date_dashed{R"(^\d{1,2}-)" + kMonth + R"(-(?:\d{4}|\d{2})$)"};

    std::regex number_digits{R"(^#?\s?\d[\d,.\-/ ]*$)"};
    std::regex number_id{R"(^#?[a-z]{1,3}[\-#]?\d{3,}[\d\-]*$)"};
};

const Rules& rules() {
    static const Rules r;
    return r;
}

bool digit_dominated(const std::string& s) {
    size_t digits = 0, visible = 0;
    for (unsigned char c : s) {
        if (std::isspace(c)) continue;
        ++visible;
        if (std::isdigit(c)) ++digits;
    }
    return visible > 0 && 2 * digits >= visible;
}

} // namespace

DataTypeSet type_of(std::string_view raw) {
    std::string text;
    text.reserve(raw.size());
    for (unsigned char c : raw) text.push_back(static_cast<char>(std::tolower(c)));
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    text.erase(text.begin(), std::find_if(text.begin(), text.end(), not_space));
    text.erase(std::find_if(text.rbegin(), text.rend(), not_space).base(), text.end());
    if (text.empty()) throw ValidationError("type_of: empty text");

    const Rules& r = rules();
    DataTypeSet out;

    if (std::regex_match(text, r.date_dmy) || std::regex_match(text, r.date_iso) ||
        std::regex_match(text, r.date_month_first) || std::regex_match(text, r.date_day_first) ||
        std::regex_match(text, r.date_dashed)) {
        out.insert(DataType::date);
        return out;
    }

    if (std::regex_match(text, r.money_marked) || std::regex_match(text, r.money_suffixed) ||
        std::regex_match(text, r.money_bare)) {
        out.insert(DataType::money);
        out.insert(DataType::number);
        return out;
    }

    if ((std::regex_match(text, r.number_digits) && digit_dominated(text)) || std::regex_match(text, r.number_id)) {
        out.insert(DataType::number);
        return out;
    }

    out.insert(DataType::other);
    return out;
}

} // namespace ffrg
