#include "ffrg/data_type.hpp"

#include "ffrg/errors.hpp"

namespace ffrg {

std::string_view to_string(DataType t) {
    switch (t) {
    case DataType::number: return "number";
    case DataType::date: return "date";
    case DataType::money: return "money";
    case DataType::other: return "other";
    }
    return "other";
}

DataType data_type_from_string(std::string_view s) {
    if (s == "number") return DataType::number;
    if (s == "date") return DataType::date;
    if (s == "money") return DataType::money;
    if (s == "other") return DataType::other;
    throw ValidationError("unknown data type '" + std::string(s) + "'");
}

std::vector<DataType> DataTypeSet::members() const {
    std::vector<DataType> out;
    for (auto t : {DataType::number, DataType::date, DataType::money, DataType::other})
        if (contains(t)) out.push_back(t);
    return out;
}

} // namespace ffrg
