#include <gtest/gtest.h>

#include "findebate/error.hpp"
#include "findebate/hashing.hpp"
#include "findebate/transcript.hpp"
#include "test_util.hpp"

using namespace findebate;

TEST(Hashing, Sha256MatchesReferenceDigests) {
  // Reference values from Python hashlib.
  EXPECT_EQ(sha256_hex("net interest margin"), "0a2f16844bd480343abc9179b84a4e65537b71602b227ac566ef443814af3185");
  EXPECT_EQ(sha256_hex("net interest margins"), "738875baa45c84b64ae8e156b395b3588a380961d9b91de42e056099d483c390");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), sha256_hex("abc"));
}

TEST(Hashing, LongInputCrossesBlockBoundaries) {
  // "a" * 1000, from hashlib.
  EXPECT_EQ(sha256_hex(std::string(1000, 'a')), "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}

TEST(Hashing, Fnv1a64) {
  static_assert(fnv1a64("") == 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("hello"), 11831194018420276491ULL);
}

TEST(Transcript, EmptyInputIsRejected) {
  try {
    parse_transcript("");
    FAIL() << "expected EmptyInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  EXPECT_THROW(parse_transcript("  \n\t\n"), Error);
}

TEST(Transcript, SpeakerMarkerOpensTurn) {
  const auto doc = parse_transcript("### Prepared remarks\n**Operator**\n: Greetings, and welcome to the ABM call.\n");
  ASSERT_EQ(doc.sections.size(), 1u);
  EXPECT_EQ(doc.sections[0].heading, "Prepared remarks");
  ASSERT_EQ(doc.sections[0].turns.size(), 1u);
  const auto& turn = doc.sections[0].turns[0];
  EXPECT_EQ(turn.speaker, "Operator");
  EXPECT_NE(turn.text.find("Greetings, and welcome"), std::string::npos);
  EXPECT_EQ(turn.text, doc.raw_text.substr(turn.span.start, turn.span.size()));
  EXPECT_TRUE(doc.warnings.empty());
}

TEST(Transcript, PlainTextFallsBackToOneUnattributedTurn) {
  const std::string text = "Revenue was up. Margins held.";
  const auto doc = parse_transcript(text);
  ASSERT_EQ(doc.sections.size(), 1u);
  EXPECT_EQ(doc.sections[0].heading, kBodySection);
  ASSERT_EQ(doc.sections[0].turns.size(), 1u);
  EXPECT_EQ(doc.sections[0].turns[0].speaker, kUnattributedSpeaker);
  EXPECT_EQ(doc.sections[0].turns[0].text, text);
  ASSERT_EQ(doc.warnings.size(), 1u);
  EXPECT_EQ(doc.warnings[0], ParseWarning::kDegenerate);
}

TEST(Transcript, DocIdDependsOnlyOnNormalizedBytes) {
  const auto a = parse_transcript("**CEO**\n: Hello.\n");
  const auto b = parse_transcript("**CEO**\r\n: Hello.\r\n");
  const auto c = parse_transcript("**CEO**\n: Hello!\n");
  EXPECT_EQ(a.doc_id, b.doc_id);
  EXPECT_NE(a.doc_id, c.doc_id);
  EXPECT_EQ(a.doc_id, doc_fingerprint("**CEO**\n: Hello.\n"));
  EXPECT_EQ(a.doc_id.size(), 64u);
}

TEST(Transcript, FixtureParsesIntoTurns) {
  const auto doc = load_transcript(testkit::fixture_path("abm_q3_2021_call.md"));
  EXPECT_EQ(doc.turn_count(), 3u);
  ASSERT_FALSE(doc.sections.empty());
  EXPECT_EQ(doc.sections[0].heading, "Prepared remarks");
  EXPECT_EQ(doc.sections[0].turns[0].speaker, "Operator");
  for (const auto& s : doc.sections) {
    for (const auto& t : s.turns) {
      EXPECT_EQ(t.text, doc.raw_text.substr(t.span.start, t.span.size()));
    }
  }
}

TEST(Transcript, TickerFromExchangeTag) {
  const auto doc = parse_transcript("## Acme Corp (NYSE: ABM) Q3 call\n**CEO**\n: Hello.\n");
  ASSERT_TRUE(doc.ticker.has_value());
  EXPECT_EQ(*doc.ticker, "ABM");
  EXPECT_FALSE(doc.title.empty());
}

TEST(Transcript, CollapseWhitespace) {
  EXPECT_EQ(collapse_whitespace("  a \n\t b  "), "a b");
  EXPECT_EQ(collapse_whitespace(""), "");
}

TEST(Transcript, ListTranscriptsIsSortedAndFiltered) {
  testkit::TempDir tmp;
  write_file(tmp.path() / "b.md", "x");
  write_file(tmp.path() / "sub" / "a.txt", "x");
  write_file(tmp.path() / "c.json", "x");
  const auto files = list_transcripts(tmp.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "b.md");
  EXPECT_EQ(files[1].filename(), "a.txt");
}
