#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "molstore/errors.hpp"

namespace molstore {

// The four-letter base alphabet. Each base carries a fixed 2-bit value:
// A=00, C=01, G=10, T=11.
enum class Base : std::uint8_t { A = 0, C = 1, G = 2, T = 3 };

inline constexpr std::array<Base, 4> all_bases{Base::A, Base::C, Base::G, Base::T};

char base_to_char(Base b);
Base base_from_char(char c);

// Ordered list of bases in 5'->3' synthesis order.
using BaseSequence = std::vector<Base>;

std::string sequence_to_string(const BaseSequence& seq);

// Parses a sequence from text, skipping whitespace and newlines.
// Throws MalformedSequenceError on any other non-base character.
BaseSequence sequence_from_string(const std::string& text);

struct DataBlock {
    std::vector<std::uint8_t> payload;
    std::uint64_t block_id = 0;
};

// Maps each payload byte to four bases, most-significant bit pair first.
// |result| = 4 * |payload|.
BaseSequence encode_block(const DataBlock& block);

// Inverse of encode_block. Throws MalformedSequenceError when the sequence
// length is not divisible by 4.
DataBlock decode_block(const BaseSequence& seq, std::uint64_t block_id = 0);

// Two bits per base.
std::uint64_t block_bit_capacity(std::uint64_t base_count);

} // namespace molstore
