#include "akap/netsim.hpp"
#include "json_util.hpp"

namespace akap {

using detail::json;
using nlohmann::ordered_json;

const TranscriptEntry& Transcript::append(std::uint64_t tick, Channel channel, std::string sender,
                                          std::string receiver, Bytes payload) {
    const std::uint64_t seq = entries_.empty() ? 1 : entries_.back().seq + 1;
    entries_.push_back({seq, tick, channel, std::move(sender), std::move(receiver), std::move(payload)});
    return entries_.back();
}

const TranscriptEntry* Transcript::find(std::uint64_t seq) const noexcept {
    for (const auto& e : entries_) {
        if (e.seq == seq) return &e;
    }
    return nullptr;
}

std::vector<TranscriptEntry> Transcript::public_entries() const {
    std::vector<TranscriptEntry> out;
    for (const auto& e : entries_) {
        if (e.channel == Channel::public_channel) out.push_back(e);
    }
    return out;
}

std::string Transcript::to_json() const {
    ordered_json doc;
    doc["fmt"] = "akap-transcript";
    doc["v"] = 1;
    doc["entries"] = ordered_json::array();
    for (const auto& e : entries_) {
        ordered_json j;
        j["seq"] = e.seq;
        j["tick"] = e.tick;
        j["channel"] = e.channel == Channel::public_channel ? "public" : "secure";
        j["sender"] = e.sender;
        j["receiver"] = e.receiver;
        j["payload_hex"] = to_hex(e.payload);
        doc["entries"].push_back(std::move(j));
    }
    doc["events"] = ordered_json::array();
    for (const auto& ev : events_) {
        ordered_json j;
        j["kind"] = ev.kind;
        j["tick"] = ev.tick;
        j["subject"] = ev.subject;
        doc["events"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

Transcript Transcript::from_json(std::string_view text) {
    const json doc = detail::parse_json(text);
    detail::check_header(doc, "akap-transcript");
    Transcript t;
    const json& entries = detail::member(doc, "entries");
    if (!entries.is_array()) throw FormatError(FormatErrc::malformed_json, "entries must be an array");
    for (const auto& j : entries) {
        TranscriptEntry e;
        e.seq = detail::uint_field(j, "seq");
        e.tick = detail::uint_field(j, "tick");
        const std::string channel = detail::string_field(j, "channel");
        if (channel == "public") {
            e.channel = Channel::public_channel;
        } else if (channel == "secure") {
            e.channel = Channel::secure;
        } else {
            throw FormatError(FormatErrc::invariant, "unknown channel '" + channel + "'");
        }
        e.sender = detail::string_field(j, "sender");
        e.receiver = detail::string_field(j, "receiver");
        e.payload = detail::hex_value(detail::member(j, "payload_hex"), "payload_hex");
        if (!t.entries_.empty() && (e.seq <= t.entries_.back().seq || e.tick < t.entries_.back().tick)) {
            throw FormatError(FormatErrc::invariant, "transcript seq/tick not monotonic");
        }
        t.entries_.push_back(std::move(e));
    }
    if (doc.contains("events")) {
        const json& events = doc["events"];
        if (!events.is_array()) throw FormatError(FormatErrc::malformed_json, "events must be an array");
        for (const auto& j : events) {
            t.events_.push_back(
                {detail::string_field(j, "kind"), detail::uint_field(j, "tick"), detail::string_field(j, "subject")});
        }
    }
    return t;
}

}  // namespace akap
