#include <gtest/gtest.h>

#include <thread>

#include "reforacle/source_set.hpp"
#include "reforacle/transcript_store.hpp"
#include "support.hpp"

namespace reforacle {
namespace {

using testing::TempDir;

RequestKey key(int attempt, std::string variant = "") {
  return RequestKey{"gpt-oss-20b", "p01", std::move(variant), attempt, "abc123"};
}

RawModelResponse response(std::string text) {
  RawModelResponse r;
  r.text = std::move(text);
  r.latency_s = 1.25;
  r.tokens_in = 900;
  r.tokens_out = 120;
  r.tokens_reasoning = 40;
  r.cost_estimate = 0.002;
  r.backend_name = "gpt-oss-20b";
  r.created_at = "2026-01-02T03:04:05.678Z";
  return r;
}

TEST(RequestKey, StringForm) {
  EXPECT_EQ(key(2).str(), "gpt-oss-20b|p01|-|2|abc123");
  EXPECT_EQ(key(1, "mt:7:AF").str(), "gpt-oss-20b|p01|mt:7:AF|1|abc123");
  EXPECT_EQ(request_key_from_json(to_json(key(3, "v"))), key(3, "v"));
}

TEST(RawModelResponse, JsonRoundTrip) {
  const RawModelResponse r = response("{\"verdict\":\"YES\"}\n\tunicode: \xc3\xa9");
  EXPECT_EQ(response_from_json(to_json(r)), r);
  RawModelResponse bare;
  bare.text = "x";
  EXPECT_EQ(response_from_json(to_json(bare)), bare);
}

TEST(TranscriptStore, RecordThenGetIsIdentical) {
  TranscriptStore store;
  store.record(key(1), response("text one"));
  ASSERT_TRUE(store.contains(key(1)));
  EXPECT_EQ(store.get(key(1))->text, "text one");
  EXPECT_FALSE(store.get(key(2)).has_value());
}

TEST(TranscriptStore, DuplicateKeyRejectedUnlessOverwrite) {
  TranscriptStore store;
  store.record(key(1), response("a"));
  try {
    store.record(key(1), response("b"));
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), StoreError::Kind::DuplicateKey);
  }
  store.record(key(1), response("b"), true);
  EXPECT_EQ(store.get(key(1))->text, "b");
  EXPECT_EQ(store.size(), 1u);
}

TEST(TranscriptStore, PersistsAcrossReopenLastRecordWins) {
  TempDir dir;
  const auto path = dir / "store.jsonl";
  {
    TranscriptStore store = TranscriptStore::open(path);
    store.record(key(1), response("first"));
    store.record(key(2), response("second"));
    store.record(key(1), response("first-again"), true);
  }
  const TranscriptStore back = TranscriptStore::open(path);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.get(key(1))->text, "first-again");
  EXPECT_EQ(*back.get(key(2)), response("second"));
}

TEST(TranscriptStore, CorruptLineReported) {
  TempDir dir;
  write_file(dir / "s.jsonl", "{\"key\": {}}\nnot json\n");
  try {
    TranscriptStore::open(dir / "s.jsonl");
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_EQ(e.kind(), StoreError::Kind::Corrupt);
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos);
  }
}

TEST(TranscriptStore, ConcurrentWritersKeepEveryRecord) {
  TempDir dir;
  const auto path = dir / "c.jsonl";
  {
    TranscriptStore store = TranscriptStore::open(path);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 50; ++i) {
          store.record(RequestKey{"m", "i" + std::to_string(t), "", i + 1, "h"}, response("x"));
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(store.size(), 400u);
  }
  EXPECT_EQ(TranscriptStore::open(path).size(), 400u);
}

TEST(UtcTimestamp, Format) {
  const std::string ts = utc_timestamp();
  ASSERT_EQ(ts.size(), 24u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts[19], '.');
  EXPECT_EQ(ts.back(), 'Z');
}

}  // namespace
}  // namespace reforacle
