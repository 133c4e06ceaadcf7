#include "tdmasim/wire.hpp"

#include <cstddef>

namespace tdma::wire {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8 & 0xff);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(v >> (8 * i) & 0xff);
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(v >> (8 * i) & 0xff);
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos{0};

    bool remaining(std::size_t n) const { return bytes.size() - pos >= n; }

    std::uint8_t u8() { return bytes[pos++]; }

    std::uint16_t u16() {
        std::uint16_t v = bytes[pos] | std::uint16_t(bytes[pos + 1]) << 8;
        pos += 2;
        return v;
    }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
};

} // namespace

std::vector<std::uint8_t> encode(const Packet& pkt) {
    std::vector<std::uint8_t> out;
    out.reserve(3 + pkt.fi_payload.size() * 13 + 2 + pkt.payload.size());
    out.push_back(pkt.sender_status == Status::Active ? 1 : 0);
    put_u16(out, static_cast<std::uint16_t>(pkt.fi_payload.size()));
    for (const auto& e : pkt.fi_payload) {
        put_u32(out, e.id);
        out.push_back(e.kind == EntryKind::Welcome ? 1 : 0);
        put_u64(out, e.rx_time);
    }
    put_u16(out, static_cast<std::uint16_t>(pkt.payload.size()));
    out.insert(out.end(), pkt.payload.begin(), pkt.payload.end());
    return out;
}

std::optional<Packet> decode(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    if (!r.remaining(3)) return std::nullopt;
    const std::uint8_t status = r.u8();
    if (status > 1) return std::nullopt;

    Packet pkt;
    pkt.sender_status = status ? Status::Active : Status::Passive;
    const std::uint16_t count = r.u16();
    for (std::uint16_t k = 0; k < count; ++k) {
        if (!r.remaining(13)) return std::nullopt;
        FrameInfoEntry e;
        e.id = r.u32();
        const std::uint8_t kind = r.u8();
        if (kind > 1) return std::nullopt;
        e.kind = kind ? EntryKind::Welcome : EntryKind::Msg;
        e.occurrence = Occurrence::Remote;
        e.rx_time = r.u64();
        pkt.fi_payload.push_back(e);
    }
    if (!r.remaining(2)) return std::nullopt;
    const std::uint16_t len = r.u16();
    if (!r.remaining(len)) return std::nullopt;
    pkt.payload.assign(bytes.begin() + r.pos, bytes.begin() + r.pos + len);
    r.pos += len;
    if (r.pos != bytes.size()) return std::nullopt;
    return pkt;
}

} // namespace tdma::wire
