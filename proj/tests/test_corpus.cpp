#include <sstream>

#include "doctest.h"

#include "newsct/corpus.hpp"
#include "newsct/rng.hpp"

using namespace newsct;

namespace {

const char* kItems =
    R"({"id":"a","published_at":0,"title":"A","summary":"","body":""})"
    "\n"
    R"({"id":"b","published_at":2,"title":"B","summary":"","body":""})"
    "\n";

EventStream parse(const std::string& items, const std::string& clicks) {
    std::istringstream is(items), cs(clicks);
    return parse_events(is, cs);
}

}  // namespace

TEST_CASE("parse_events merges items and clicks in timestamp order") {
    auto stream = parse(kItems,
                        "session_id,item_id,timestamp\n"
                        "s1,a,1\n"
                        "s1,b,3\n"
                        "s2,a,5\n");
    REQUIRE(stream.events.size() == 5);
    CHECK(stream.rejected == 0);
    std::vector<std::int64_t> times;
    for (const auto& e : stream.events) times.push_back(e.at);
    CHECK(std::is_sorted(times.begin(), times.end()));
    CHECK(stream.events[0].kind == Event::Kind::Publish);
    CHECK(stream.events[1].kind == Event::Kind::Click);
}

TEST_CASE("click before publication is rejected") {
    auto stream = parse(R"({"id":"a","published_at":10,"title":"","summary":"","body":""})" "\n",
                        "session_id,item_id,timestamp\n"
                        "s1,a,5\n");
    CHECK(stream.rejected == 1);
    CHECK(stream.events.size() == 1);
}

TEST_CASE("empty clicks source leaves only publication events") {
    auto stream = parse(kItems, "session_id,item_id,timestamp\n");
    CHECK(stream.events.size() == 2);
    for (const auto& e : stream.events) CHECK(e.kind == Event::Kind::Publish);
}

TEST_CASE("click on unknown item and malformed lines are counted") {
    auto stream = parse(kItems,
                        "session_id,item_id,timestamp\n"
                        "s1,zzz,3\n"
                        "not a csv line\n"
                        "s1,a,xyz\n"
                        "s1,b,4\n");
    CHECK(stream.rejected == 3);
    CHECK(stream.events.size() == 3);
}

TEST_CASE("publication orders before click at the same instant") {
    auto stream = parse(R"({"id":"a","published_at":7,"title":"","summary":"","body":""})" "\n",
                        "session_id,item_id,timestamp\n"
                        "s1,a,7\n");
    REQUIRE(stream.events.size() == 2);
    CHECK(stream.events[0].kind == Event::Kind::Publish);
    CHECK(stream.events[1].kind == Event::Kind::Click);
}

TEST_CASE("sessionize groups by session and keeps timestamp order") {
    auto stream = parse(kItems,
                        "session_id,item_id,timestamp\n"
                        "s1,a,1\n"
                        "s1,b,2\n"
                        "s2,a,3\n");
    auto sessions = sessionize(stream);
    REQUIRE(sessions.size() == 2);
    CHECK(sessions[0].id == "s1");
    REQUIRE(sessions[0].clicks.size() == 2);
    CHECK(sessions[0].clicks[0].item_id == "a");
    CHECK(sessions[0].clicks[1].item_id == "b");
    REQUIRE(sessions[1].clicks.size() == 1);
    CHECK(sessions[1].clicks[0].item_id == "a");
}

TEST_CASE("consecutive duplicate clicks collapse, non-adjacent repeats stay") {
    auto stream = parse(kItems,
                        "session_id,item_id,timestamp\n"
                        "s1,a,1\n"
                        "s1,a,2\n"
                        "s1,b,3\n"
                        "s1,a,4\n");
    auto sessions = sessionize(stream);
    REQUIRE(sessions.size() == 1);
    REQUIRE(sessions[0].clicks.size() == 3);
    CHECK(sessions[0].clicks[0].item_id == "a");
    CHECK(sessions[0].clicks[1].item_id == "b");
    CHECK(sessions[0].clicks[2].item_id == "a");
}

TEST_CASE("no clicks gives empty session list") {
    auto stream = parse(kItems, "session_id,item_id,timestamp\n");
    CHECK(sessionize(stream).empty());
}

TEST_CASE("serialize then parse is the identity on valid corpora") {
    auto stream = parse(kItems,
                        "session_id,item_id,timestamp\n"
                        "s1,a,1\n"
                        "s1,b,3\n"
                        "s2,a,5\n");
    std::ostringstream items_out, clicks_out;
    write_items_jsonl(items_out, stream.corpus);
    write_clicks_csv(clicks_out, stream);
    auto round = parse(items_out.str(), clicks_out.str());
    REQUIRE(round.events.size() == stream.events.size());
    CHECK(round.rejected == 0);
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        CHECK(round.events[i].kind == stream.events[i].kind);
        CHECK(round.events[i].at == stream.events[i].at);
        CHECK(round.corpus.items[round.events[i].item].id ==
              stream.corpus.items[stream.events[i].item].id);
        CHECK(round.events[i].session_id == stream.events[i].session_id);
    }
}

TEST_CASE("property: sessionize output satisfies the Session invariants") {
    Rng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        std::ostringstream clicks;
        clicks << "session_id,item_id,timestamp\n";
        int n = static_cast<int>(rng.next_below(40));
        for (int i = 0; i < n; ++i) {
            clicks << "s" << rng.next_below(5) << ',' << (rng.next_below(2) ? "a" : "b") << ','
                   << 2 + rng.next_below(100) << '\n';
        }
        auto stream = parse(kItems, clicks.str());
        for (const Session& s : sessionize(stream)) {
            REQUIRE(!s.clicks.empty());
            for (std::size_t i = 0; i < s.clicks.size(); ++i) {
                CHECK(s.clicks[i].session_id == s.id);
                if (i > 0) {
                    CHECK(s.clicks[i].at >= s.clicks[i - 1].at);
                    CHECK(s.clicks[i].item_id != s.clicks[i - 1].item_id);
                }
            }
        }
    }
}
