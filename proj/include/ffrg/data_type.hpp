#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ffrg {

enum class DataType : std::uint8_t { number = 0, date = 1, money = 2, other = 3 };

std::string_view to_string(DataType t);
DataType data_type_from_string(std::string_view s);

// Small bitset over DataType.
class DataTypeSet {
public:
    constexpr DataTypeSet() = default;
    constexpr DataTypeSet(std::initializer_list<DataType> types) {
        for (auto t : types) insert(t);
    }

    constexpr void insert(DataType t) { bits_ |= bit(t); }
    constexpr bool contains(DataType t) const { return (bits_ & bit(t)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool intersects(DataTypeSet o) const { return (bits_ & o.bits_) != 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    std::vector<DataType> members() const;

    friend constexpr bool operator==(DataTypeSet a, DataTypeSet b) { return a.bits_ == b.bits_; }

private:
    static constexpr std::uint8_t bit(DataType t) { return std::uint8_t(1u << static_cast<unsigned>(t)); }
    std::uint8_t bits_ = 0;
};

} // namespace ffrg
