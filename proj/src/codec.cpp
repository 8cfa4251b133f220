#include "molstore/codec.hpp"

#include <cctype>

namespace molstore {

char base_to_char(Base b) {
    switch (b) {
    case Base::A: return 'A';
    case Base::C: return 'C';
    case Base::G: return 'G';
    case Base::T: return 'T';
    }
    throw MalformedSequenceError("invalid base value");
}

Base base_from_char(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'A': return Base::A;
    case 'C': return Base::C;
    case 'G': return Base::G;
    case 'T': return Base::T;
    default:
        throw MalformedSequenceError(std::string("unknown base symbol '") + c + "'");
    }
}

std::string sequence_to_string(const BaseSequence& seq) {
    std::string out;
    out.reserve(seq.size());
    for (Base b : seq) out.push_back(base_to_char(b));
    return out;
}

BaseSequence sequence_from_string(const std::string& text) {
    BaseSequence seq;
    seq.reserve(text.size());
    for (char c : text) {
        if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
        seq.push_back(base_from_char(c));
    }
    return seq;
}

BaseSequence encode_block(const DataBlock& block) {
    BaseSequence seq;
    seq.reserve(block.payload.size() * 4);
    for (std::uint8_t byte : block.payload) {
        for (int shift = 6; shift >= 0; shift -= 2) {
            seq.push_back(static_cast<Base>((byte >> shift) & 0x3));
        }
    }
    return seq;
}

DataBlock decode_block(const BaseSequence& seq, std::uint64_t block_id) {
    if (seq.size() % 4 != 0) {
        throw MalformedSequenceError("sequence length " + std::to_string(seq.size()) +
                                     " is not a multiple of 4");
    }
    DataBlock block;
    block.block_id = block_id;
    block.payload.reserve(seq.size() / 4);
    for (std::size_t i = 0; i < seq.size(); i += 4) {
        std::uint8_t byte = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            byte = static_cast<std::uint8_t>((byte << 2) | static_cast<std::uint8_t>(seq[i + j]));
        }
        block.payload.push_back(byte);
    }
    return block;
}

std::uint64_t block_bit_capacity(std::uint64_t base_count) {
    return 2 * base_count;
}

} // namespace molstore
