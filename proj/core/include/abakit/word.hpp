#pragma once

#include <concepts>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace abakit {

// Word type of the simulated backend: unbounded, so cells may declare any
// width. Bounds are enforced per cell by the memory, not by the type.
using BigWord = boost::multiprecision::cpp_int;

// Bit-field helpers shared by both backends (std::uint64_t and BigWord).
template <class W>
W low_ones(unsigned bits) {
  if constexpr (std::same_as<W, std::uint64_t>) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  } else {
    return (W(1) << bits) - 1;
  }
}

template <class W>
std::uint64_t extract(const W& word, unsigned shift, unsigned bits) {
  return static_cast<std::uint64_t>((word >> shift) & low_ones<W>(bits));
}

template <class W>
W place(std::uint64_t field, unsigned shift) {
  return W(field) << shift;
}

template <class W>
bool test_bit(const W& word, unsigned bit) {
  return ((word >> bit) & W(1)) != W(0);
}

inline std::string word_to_string(std::uint64_t w) { return std::to_string(w); }
inline std::string word_to_string(const BigWord& w) { return w.str(); }

}  // namespace abakit
