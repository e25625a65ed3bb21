#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace newsct {

using ItemIndex = std::int32_t;

struct NewsItem {
    std::string id;
    std::int64_t published_at = 0;
    std::string title;
    std::string summary;
    std::string body;
};

struct ClickEvent {
    std::string session_id;
    std::string item_id;
    std::int64_t at = 0;
};

struct Session {
    std::string id;
    std::vector<ClickEvent> clicks;  // timestamp order, consecutive duplicates collapsed
};

// Merged, timestamp-ordered stream of publications and clicks. Clicks refer to
// items by dense index into corpus.items; a publication at the same instant as
// a click is ordered first.
struct Event {
    enum class Kind : std::uint8_t { Publish, Click };
    Kind kind = Kind::Publish;
    std::int64_t at = 0;
    ItemIndex item = -1;
    std::string session_id;  // clicks only
};

struct Corpus {
    std::vector<NewsItem> items;
    std::unordered_map<std::string, ItemIndex> index_of;

    ItemIndex add(NewsItem item);
    ItemIndex find(const std::string& id) const;  // -1 if absent
};

struct EventStream {
    Corpus corpus;
    std::vector<Event> events;
    std::size_t rejected = 0;  // malformed or invariant-violating records skipped
};

// items_source: one JSON object per line (id, published_at, title, summary, body).
// clicks_source: CSV with header session_id,item_id,timestamp.
// Malformed lines, clicks on unknown items and clicks preceding publication are
// counted in EventStream::rejected and skipped. Throws std::runtime_error on a
// stream in a failed state before any data was read.
EventStream parse_events(std::istream& items_source, std::istream& clicks_source);

// Groups clicks by session id, orders by timestamp, collapses consecutive
// duplicate items (page reloads). Sessions are returned in order of first click.
std::vector<Session> sessionize(const EventStream& stream);

void write_items_jsonl(std::ostream& out, const Corpus& corpus);
void write_clicks_csv(std::ostream& out, const EventStream& stream);

}  // namespace newsct
