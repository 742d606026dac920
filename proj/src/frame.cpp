#include "wsnlight/frame.hpp"

namespace wsnlight {

namespace {

struct KindBits {
    uint8_t cls;
    uint8_t topo;
    uint8_t data_ack;
    const char* name;
};

constexpr KindBits kKindTable[kFrameKindCount] = {
    {0b00, 0, 0, "SN_REQ_DEC"},
    {0b00, 0, 1, "SN_REQ_INC"},
    {0b00, 1, 0, "TOPO_PING"},
    {0b00, 1, 1, "TOPO_PONG"},
    {0b01, 0, 0, "LCN_HELLO"},
    {0b01, 0, 1, "MN_ID_ECHO"},
    {0b01, 1, 0, "MN_ADDR_SET"},
    {0b01, 1, 1, "LCN_ADDR_ACK"},
    {0b10, 0, 0, "MN_BCAST"},
    {0b10, 0, 1, "SN_ACK"},
    {0b11, 0, 0, "LCN_SET_MAX"},
    {0b11, 0, 1, "LCN_RESTORE"},
    {0b11, 1, 0, "LCN_STEP_DEC"},
    {0b11, 1, 1, "LCN_STEP_INC"},
};

// triple -> kind, index = cls*4 + topo*2 + data_ack; -1 for reserved
constexpr int kTripleToKind[16] = {
    0,  1,  2,  3,  // 00
    4,  5,  6,  7,  // 01
    8,  9, -1, -1,  // 10: topo combinations reserved
    10, 11, 12, 13, // 11
};

} // namespace

FrameClass frame_class(FrameKind kind) {
    return static_cast<FrameClass>(kKindTable[static_cast<int>(kind)].cls);
}

bool topo_bit(FrameKind kind) { return kKindTable[static_cast<int>(kind)].topo != 0; }

bool data_ack_bit(FrameKind kind) { return kKindTable[static_cast<int>(kind)].data_ack != 0; }

const char* kind_name(FrameKind kind) { return kKindTable[static_cast<int>(kind)].name; }

bool frame_valid(const Frame& f) {
    if (f.nibble > 0x0F) return false;
    switch (f.kind) {
        case FrameKind::LcnStepDec:
        case FrameKind::LcnStepInc:
            return f.nibble >= 1;
        case FrameKind::LcnSetMax:
        case FrameKind::LcnRestore:
            return f.nibble == 0;
        default:
            return true;
    }
}

uint8_t encode(const Frame& f) {
    const KindBits& bits = kKindTable[static_cast<int>(f.kind)];
    return static_cast<uint8_t>((bits.cls << 6) | (bits.topo << 5) | (bits.data_ack << 4) |
                                (f.nibble & 0x0F));
}

std::optional<Frame> decode(uint8_t octet) {
    const int triple = octet >> 4;
    const int kind_index = kTripleToKind[triple];
    if (kind_index < 0) return std::nullopt;
    Frame f{static_cast<FrameKind>(kind_index), static_cast<uint8_t>(octet & 0x0F)};
    if (!frame_valid(f)) return std::nullopt;
    return f;
}

} // namespace wsnlight
