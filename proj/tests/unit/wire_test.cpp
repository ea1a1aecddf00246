#include <gtest/gtest.h>

#include "support.hpp"

namespace akap {
namespace {

TEST(Wire, RoundTripProperty) {
    std::mt19937_64 g(11);
    for (int i = 0; i < 2000; ++i) {
        const WireMessage m = test::random_message(g);
        const Bytes frame = encode(m);
        EXPECT_EQ(frame[0], static_cast<std::uint8_t>(kind_of(m)));
        EXPECT_EQ(decode(frame), m);
        EXPECT_EQ(encode(decode(frame)), frame);
    }
}

TEST(Wire, FrameSizes) {
    const Timestamp t{1};
    EXPECT_EQ(encode(M1{{}, {}, {}, t}).size(), 1 + 3 * 32 + 8u);
    EXPECT_EQ(encode(M2{{}, {}, {}, {}, t}).size(), 1 + 4 * 32 + 8u);
    EXPECT_EQ(encode(M3{{}, {}, {}, t}).size(), 1 + 3 * 32 + 8u);
    EXPECT_EQ(encode(M4{{}, {}, {}, {}, {}, t}).size(), 1 + 5 * 32 + 8u);
    EXPECT_EQ(encode(UserRegRequest{}).size(), 1 + 3 * 32u);
    EXPECT_EQ(to_hex(encode(SensorRegRequest{"ab", Bytes{0xff}})), "12000261620001ff");
}

TEST(Wire, RejectsMalformedFrames) {
    std::mt19937_64 g(12);
    for (int i = 0; i < 500; ++i) {
        const Bytes frame = encode(test::random_message(g));
        Bytes longer = frame;
        longer.push_back(0);
        EXPECT_THROW((void)decode(longer), WireError);
        const Bytes shorter(frame.begin(), frame.end() - 1);
        EXPECT_THROW((void)decode(shorter), WireError);
    }
    EXPECT_THROW((void)decode(Bytes{}), WireError);
    EXPECT_THROW((void)decode(Bytes{0x05}), WireError);
    EXPECT_THROW((void)decode(Bytes{0xff, 0, 0}), WireError);
    Bytes zero_ts = encode(M1{{}, {}, {}, Timestamp{1}});
    zero_ts.back() = 0;
    EXPECT_THROW((void)decode(zero_ts), WireError);
    EXPECT_THROW((void)decode(Bytes{0x12, 0, 0, 0, 0}), WireError);  // empty SID
}

TEST(Wire, KindNames) {
    for (auto k : {MessageKind::m1, MessageKind::m2, MessageKind::m3, MessageKind::m4, MessageKind::user_reg_request,
                   MessageKind::user_reg_response, MessageKind::sensor_reg_request, MessageKind::sensor_reg_response}) {
        EXPECT_EQ(parse_message_kind(to_string(k)), k);
    }
    EXPECT_EQ(to_string(MessageKind::m3), "M3");
    EXPECT_FALSE(parse_message_kind("M5"));
}

TEST(Wire, FieldLayoutsPointAtTheFields) {
    std::mt19937_64 g(13);
    const M4 m{test::random_block(g), test::random_block(g), test::random_block(g), test::random_block(g),
               test::random_block(g), Timestamp{9}};
    const Bytes frame = encode(m);
    const Block* expected[] = {&m.b5, &m.b10, &m.b11, &m.x_gu, &m.x_su};
    const auto fields = block_fields(MessageKind::m4);
    ASSERT_EQ(fields.size(), 5u);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        EXPECT_EQ(fields[i].length, 32u);
        EXPECT_EQ(Block::from(ByteView(frame).subspan(fields[i].offset, 32)), *expected[i]) << fields[i].name;
    }
    EXPECT_EQ(block_fields(MessageKind::m1).size(), 3u);
    EXPECT_EQ(block_fields(MessageKind::m2).size(), 4u);
    EXPECT_EQ(block_fields(MessageKind::m3).size(), 3u);
    EXPECT_TRUE(block_fields(MessageKind::user_reg_request).empty());
    EXPECT_EQ(find_field(MessageKind::m2, "b6")->offset, 1 + 2 * 32u);
    EXPECT_FALSE(find_field(MessageKind::m2, "t2"));
}

}  // namespace
}  // namespace akap
