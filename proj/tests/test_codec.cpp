#include <doctest.h>

#include <random>

#include "molstore/codec.hpp"
#include "molstore/errors.hpp"

using namespace molstore;

TEST_CASE("2-bit mapping follows the fixed convention") {
    CHECK(base_to_char(Base::A) == 'A');
    CHECK(base_from_char('t') == Base::T);
    CHECK_THROWS_AS(base_from_char('X'), MalformedSequenceError);

    DataBlock block{{0x1B}, 0};
    const auto seq = encode_block(block);
    CHECK(sequence_to_string(seq) == "ACGT");
    CHECK(decode_block(seq).payload == std::vector<std::uint8_t>{0x1B});

    CHECK(encode_block({{0x00}, 0}) == BaseSequence{Base::A, Base::A, Base::A, Base::A});
    CHECK(encode_block({{0xFF}, 0}) == BaseSequence{Base::T, Base::T, Base::T, Base::T});
    // 0xE4 = 11 10 01 00, most significant pair first
    CHECK(sequence_to_string(encode_block({{0xE4}, 0})) == "TGCA");
}

TEST_CASE("empty payload and empty sequence are identities") {
    CHECK(encode_block({{}, 0}).empty());
    CHECK(decode_block({}).payload.empty());
}

TEST_CASE("sequence length not divisible by 4 is rejected") {
    CHECK_THROWS_AS(decode_block(sequence_from_string("ACG")), MalformedSequenceError);
    CHECK_THROWS_AS(decode_block(sequence_from_string("ACGTA")), MalformedSequenceError);
}

TEST_CASE("random payloads round-trip byte-exactly") {
    std::mt19937_64 rng(0xc0dec);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> len(0, 64);
    for (int trial = 0; trial < 1200; ++trial) {
        DataBlock block;
        block.block_id = static_cast<std::uint64_t>(trial);
        block.payload.resize(len(rng));
        for (auto& b : block.payload)
            b = static_cast<std::uint8_t>(byte(rng));

        const auto seq = encode_block(block);
        CHECK(seq.size() == 4 * block.payload.size());
        CHECK(block_bit_capacity(seq.size()) == 8 * block.payload.size());

        const auto back = decode_block(seq, block.block_id);
        CHECK(back.payload == block.payload);
        CHECK(back.block_id == block.block_id);
    }
}

TEST_CASE("capacity arithmetic matches the 60 MB block sizing") {
    CHECK(block_bit_capacity(0) == 0);
    CHECK(block_bit_capacity(4) == 8);
    // 2.5e8 bases carry 5e8 bits
    CHECK(block_bit_capacity(250'000'000) == 500'000'000);
    // 60 MB payload needs 2.4e8 bases
    DataBlock big;
    big.payload.assign(60'000'000, 0xA5);
    CHECK(encode_block(big).size() == 240'000'000);
}

TEST_CASE("string parsing skips whitespace and rejects junk") {
    const auto seq = sequence_from_string(" AC\nGT\t\n");
    CHECK(sequence_to_string(seq) == "ACGT");
    CHECK_THROWS_AS(sequence_from_string("ACGU"), MalformedSequenceError);
}
