#include "akap/messages.hpp"

#include <array>

namespace akap {

namespace {

class Writer {
public:
    explicit Writer(MessageKind kind) { out_.push_back(static_cast<std::uint8_t>(kind)); }

    Writer& block(const Block& b) {
        out_.insert(out_.end(), b.bytes.begin(), b.bytes.end());
        return *this;
    }
    Writer& timestamp(Timestamp t) {
        auto be = encode_be64(t.ticks);
        out_.insert(out_.end(), be.begin(), be.end());
        return *this;
    }
    Writer& var(ByteView v) {
        if (v.size() > 0xffff) throw std::invalid_argument("variable-length field exceeds 65535 bytes");
        out_.push_back(static_cast<std::uint8_t>(v.size() >> 8));
        out_.push_back(static_cast<std::uint8_t>(v.size() & 0xff));
        out_.insert(out_.end(), v.begin(), v.end());
        return *this;
    }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class Reader {
public:
    explicit Reader(ByteView in) : in_(in) {}

    Block block() { return Block::from(take(Block::size)); }
    Timestamp timestamp() {
        Timestamp t{decode_be64(take(8))};
        if (t.ticks == 0) throw WireError("timestamp must be strictly positive");
        return t;
    }
    Bytes var() {
        ByteView len = take(2);
        std::size_t n = (static_cast<std::size_t>(len[0]) << 8) | len[1];
        ByteView v = take(n);
        return Bytes(v.begin(), v.end());
    }
    void finish() const {
        if (pos_ != in_.size()) throw WireError("trailing bytes after message");
    }

private:
    ByteView take(std::size_t n) {
        if (in_.size() - pos_ < n) throw WireError("truncated frame");
        ByteView v = in_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    ByteView in_;
    std::size_t pos_{0};
};

struct KindName {
    MessageKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 8> kKindNames{{
    {MessageKind::m1, "M1"},
    {MessageKind::m2, "M2"},
    {MessageKind::m3, "M3"},
    {MessageKind::m4, "M4"},
    {MessageKind::user_reg_request, "user-reg-request"},
    {MessageKind::user_reg_response, "user-reg-response"},
    {MessageKind::sensor_reg_request, "sensor-reg-request"},
    {MessageKind::sensor_reg_response, "sensor-reg-response"},
}};

std::vector<std::string_view> block_field_names(MessageKind kind) {
    switch (kind) {
        case MessageKind::m1: return {"hid", "b2", "x_ug"};
        case MessageKind::m2: return {"b4", "b5", "b6", "x_gs"};
        case MessageKind::m3: return {"b8", "x_sg", "x_su"};
        case MessageKind::m4: return {"b5", "b10", "b11", "x_gu", "x_su"};
        default: return {};
    }
}

}  // namespace

MessageKind kind_of(const WireMessage& msg) noexcept {
    static constexpr std::array<MessageKind, 8> kinds{
        MessageKind::m1,
        MessageKind::m2,
        MessageKind::m3,
        MessageKind::m4,
        MessageKind::user_reg_request,
        MessageKind::user_reg_response,
        MessageKind::sensor_reg_request,
        MessageKind::sensor_reg_response,
    };
    return kinds[msg.index()];
}

std::string_view to_string(MessageKind kind) noexcept {
    for (const auto& kn : kKindNames) {
        if (kn.kind == kind) return kn.name;
    }
    return "unknown";
}

std::optional<MessageKind> parse_message_kind(std::string_view name) noexcept {
    for (const auto& kn : kKindNames) {
        if (kn.name == name) return kn.kind;
    }
    return std::nullopt;
}

Bytes encode(const WireMessage& msg) {
    Writer w(kind_of(msg));
    std::visit(
        [&w](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, M1>) {
                w.block(m.hid).block(m.b2).block(m.x_ug).timestamp(m.t1);
            } else if constexpr (std::is_same_v<T, M2>) {
                w.block(m.b4).block(m.b5).block(m.b6).block(m.x_gs).timestamp(m.t2);
            } else if constexpr (std::is_same_v<T, M3>) {
                w.block(m.b8).block(m.x_sg).block(m.x_su).timestamp(m.t3);
            } else if constexpr (std::is_same_v<T, M4>) {
                w.block(m.b5).block(m.b10).block(m.b11).block(m.x_gu).block(m.x_su).timestamp(m.t4);
            } else if constexpr (std::is_same_v<T, UserRegRequest>) {
                w.block(m.hid).block(m.hpw).block(m.n);
            } else if constexpr (std::is_same_v<T, UserRegResponse>) {
                w.block(m.d1).block(m.d3).block(m.d4);
            } else if constexpr (std::is_same_v<T, SensorRegRequest>) {
                w.var(as_bytes(m.sid)).var(m.public_key);
            } else {
                w.block(m.sg).var(m.l);
            }
        },
        msg);
    return w.take();
}

WireMessage decode(ByteView frame) {
    if (frame.empty()) throw WireError("empty frame");
    Reader r(frame.subspan(1));
    WireMessage out;
    switch (static_cast<MessageKind>(frame[0])) {
        case MessageKind::m1: {
            M1 m;
            m.hid = r.block(), m.b2 = r.block(), m.x_ug = r.block(), m.t1 = r.timestamp();
            out = m;
            break;
        }
        case MessageKind::m2: {
            M2 m;
            m.b4 = r.block(), m.b5 = r.block(), m.b6 = r.block(), m.x_gs = r.block(), m.t2 = r.timestamp();
            out = m;
            break;
        }
        case MessageKind::m3: {
            M3 m;
            m.b8 = r.block(), m.x_sg = r.block(), m.x_su = r.block(), m.t3 = r.timestamp();
            out = m;
            break;
        }
        case MessageKind::m4: {
            M4 m;
            m.b5 = r.block(), m.b10 = r.block(), m.b11 = r.block(), m.x_gu = r.block(), m.x_su = r.block();
            m.t4 = r.timestamp();
            out = m;
            break;
        }
        case MessageKind::user_reg_request: {
            UserRegRequest m;
            m.hid = r.block(), m.hpw = r.block(), m.n = r.block();
            out = m;
            break;
        }
        case MessageKind::user_reg_response: {
            UserRegResponse m;
            m.d1 = r.block(), m.d3 = r.block(), m.d4 = r.block();
            out = m;
            break;
        }
        case MessageKind::sensor_reg_request: {
            SensorRegRequest m;
            Bytes sid = r.var();
            if (sid.empty()) throw WireError("empty sensor identity");
            m.sid.assign(sid.begin(), sid.end());
            m.public_key = r.var();
            out = m;
            break;
        }
        case MessageKind::sensor_reg_response: {
            SensorRegResponse m;
            m.sg = r.block();
            m.l = r.var();
            out = m;
            break;
        }
        default:
            throw WireError("unknown message tag " + std::to_string(frame[0]));
    }
    r.finish();
    return out;
}

std::vector<FieldLayout> block_fields(MessageKind kind) {
    std::vector<FieldLayout> out;
    std::size_t offset = 1;
    for (auto name : block_field_names(kind)) {
        out.push_back({name, offset, Block::size});
        offset += Block::size;
    }
    return out;
}

std::optional<FieldLayout> find_field(MessageKind kind, std::string_view field) {
    for (const auto& f : block_fields(kind)) {
        if (f.name == field) return f;
    }
    return std::nullopt;
}

}  // namespace akap
