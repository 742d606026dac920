#pragma once

#include <cstdint>
#include <optional>

namespace wsnlight {

/*
 * Wire format, one octet per frame:
 *
 *   ┌────┬────┬──────┬──────────┬────────────────┐
 *   │ C1 │ C2 │ topo │ data/ack │     nibble     │
 *   │ b7 │ b6 │  b5  │    b4    │    b3 .. b0    │
 *   └────┴────┴──────┴──────────┴────────────────┘
 *
 * On air a frame is preceded by an 8-bit destination hardware address
 * (encoder-level), 16 payload bits total.
 *
 * Message assignment, normative for the whole project:
 *
 *   kind          C1C2 topo d/a  nibble              direction
 *   SN_REQ_DEC     00   0    0   sender SN id        SN  -> MN
 *   SN_REQ_INC     00   0    1   sender SN id        SN  -> MN
 *   TOPO_PING      00   1    0   target node id      MN  -> node
 *   TOPO_PONG      00   1    1   responder id        node-> MN
 *   LCN_HELLO      01   0    0   LCN factory id      LCN -> MN
 *   MN_ID_ECHO     01   0    1   echoed LCN id       MN  -> LCN
 *   MN_ADDR_SET    01   1    0   assigned addr idx   MN  -> LCN
 *   LCN_ADDR_ACK   01   1    1   accepted addr idx   LCN -> MN
 *   MN_BCAST       10   0    0   MN addr idx         MN  -> all
 *   SN_ACK         10   0    1   SN id               SN  -> MN
 *   LCN_SET_MAX    11   0    0   unused, must be 0   MN  -> LCN
 *   LCN_RESTORE    11   0    1   unused, must be 0   MN  -> LCN
 *   LCN_STEP_DEC   11   1    0   step count >= 1     MN  -> LCN
 *   LCN_STEP_INC   11   1    1   step count >= 1     MN  -> LCN
 *
 * The two 10/1/x combinations are reserved and never decode. Step frames
 * with a zero count and LCN_SET_MAX / LCN_RESTORE with a nonzero nibble
 * are likewise rejected, so every decodable octet re-encodes to itself.
 */

enum class FrameClass : uint8_t {
    Normal = 0b00,
    LcnCommission = 0b01,
    SnCommission = 0b10,
    Mapping = 0b11,
};

enum class FrameKind : uint8_t {
    SnReqDec,
    SnReqInc,
    TopoPing,
    TopoPong,
    LcnHello,
    MnIdEcho,
    MnAddrSet,
    LcnAddrAck,
    MnBcast,
    SnAck,
    LcnSetMax,
    LcnRestore,
    LcnStepDec,
    LcnStepInc,
};

constexpr int kFrameKindCount = 14;

struct Frame {
    FrameKind kind = FrameKind::SnReqDec;
    uint8_t nibble = 0; // 4-bit payload: node id, address index, or step count

    bool operator==(const Frame&) const = default;
};

// 8-bit encoder-level hardware address.
struct HwAddress {
    uint8_t value = 0;
    auto operator<=>(const HwAddress&) const = default;
};

constexpr HwAddress kBroadcastAddr{0xFF};
constexpr HwAddress kUnassignedAddr{0x00};

FrameClass frame_class(FrameKind kind);
bool topo_bit(FrameKind kind);
bool data_ack_bit(FrameKind kind);
const char* kind_name(FrameKind kind);

// True when (kind, nibble) is representable on the wire.
bool frame_valid(const Frame& f);

// Precondition: frame_valid(f).
uint8_t encode(const Frame& f);

// nullopt when the octet is a reserved combination.
std::optional<Frame> decode(uint8_t octet);

} // namespace wsnlight
