#include "newsct/corpus.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace newsct {

ItemIndex Corpus::add(NewsItem item) {
    ItemIndex idx = static_cast<ItemIndex>(items.size());
    index_of.emplace(item.id, idx);
    items.push_back(std::move(item));
    return idx;
}

ItemIndex Corpus::find(const std::string& id) const {
    auto it = index_of.find(id);
    return it == index_of.end() ? -1 : it->second;
}

namespace {

void sort_events(std::vector<Event>& events) {
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.at != b.at) return a.at < b.at;
        // publication before click at the same instant
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
}

// minimal CSV field split; the clicks format has no quoting
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

}  // namespace

EventStream parse_events(std::istream& items_source, std::istream& clicks_source) {
    if (items_source.fail() || clicks_source.fail())
        throw std::runtime_error("parse_events: unreadable source");

    EventStream stream;
    std::string line;

    while (std::getline(items_source, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("published_at") ||
            !j["id"].is_string() || !j["published_at"].is_number()) {
            ++stream.rejected;
            continue;
        }
        NewsItem item;
        item.id = j["id"].get<std::string>();
        item.published_at = j["published_at"].get<std::int64_t>();
        item.title = j.value("title", "");
        item.summary = j.value("summary", "");
        item.body = j.value("body", "");
        if (item.published_at < 0 || stream.corpus.find(item.id) >= 0) {
            ++stream.rejected;
            continue;
        }
        ItemIndex idx = stream.corpus.add(std::move(item));
        stream.events.push_back({Event::Kind::Publish, stream.corpus.items[idx].published_at, idx, {}});
    }

    bool first = true;
    while (std::getline(clicks_source, line)) {
        if (line.empty() || line == "\r") continue;
        if (first) {  // header
            first = false;
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 3) { ++stream.rejected; continue; }
        std::int64_t at;
        try {
            std::size_t pos = 0;
            at = std::stoll(fields[2], &pos);
            if (pos != fields[2].size()) { ++stream.rejected; continue; }
        } catch (const std::exception&) {
            ++stream.rejected;
            continue;
        }
        ItemIndex idx = stream.corpus.find(fields[1]);
        if (idx < 0 || stream.corpus.items[idx].published_at > at) {
            ++stream.rejected;  // unknown item or click precedes publication
            continue;
        }
        stream.events.push_back({Event::Kind::Click, at, idx, fields[0]});
    }

    sort_events(stream.events);
    return stream;
}

std::vector<Session> sessionize(const EventStream& stream) {
    std::vector<Session> sessions;
    std::unordered_map<std::string, std::size_t> slot;
    for (const Event& e : stream.events) {
        if (e.kind != Event::Kind::Click) continue;
        auto [it, inserted] = slot.emplace(e.session_id, sessions.size());
        if (inserted) sessions.push_back({e.session_id, {}});
        Session& s = sessions[it->second];
        const std::string& item_id = stream.corpus.items[e.item].id;
        if (!s.clicks.empty() && s.clicks.back().item_id == item_id) continue;  // reload
        s.clicks.push_back({e.session_id, item_id, e.at});
    }
    return sessions;
}

void write_items_jsonl(std::ostream& out, const Corpus& corpus) {
    for (const NewsItem& item : corpus.items) {
        nlohmann::json j{{"id", item.id},
                         {"published_at", item.published_at},
                         {"title", item.title},
                         {"summary", item.summary},
                         {"body", item.body}};
        out << j.dump() << '\n';
    }
}

void write_clicks_csv(std::ostream& out, const EventStream& stream) {
    out << "session_id,item_id,timestamp\n";
    for (const Event& e : stream.events) {
        if (e.kind != Event::Kind::Click) continue;
        out << e.session_id << ',' << stream.corpus.items[e.item].id << ',' << e.at << '\n';
    }
}

}  // namespace newsct
