#include <gtest/gtest.h>

#include "reforacle/java_lexer.hpp"
#include "reforacle/metamorph.hpp"
#include "support.hpp"

namespace reforacle::mt {
namespace {

using reforacle::testing::single_file;
using reforacle::testing::TempDir;

const char* kProgram = R"(package shop;

public class Cart {
  private int items;

  public int add(int n) {
    items += n;
    return items;
  }
}
)";

std::size_t brace_balance(const SourceSet& s) {
  long depth = 0;
  for (const auto& f : s.files) {
    for (const auto& t : java::tokenize(f.content)) {
      if (t.is_comment()) continue;
      const auto text = t.text(f.content);
      if (text == "{") ++depth;
      if (text == "}") --depth;
    }
  }
  return static_cast<std::size_t>(depth);
}

TEST(OperatorId, StringRoundTrip) {
  for (OperatorId op : kAllOperators) EXPECT_EQ(operator_from_string(to_string(op)), op);
  EXPECT_EQ(to_string(OperatorId::LVD), "LVD");
  EXPECT_FALSE(operator_from_string("XX").has_value());
}

TEST(FreshIdentifier, AvoidsKeywordsAndKnownNames) {
  StructuralIndex idx = index_structure(single_file("Cart.java", kProgram));
  CounterRng rng(7);
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) {
    const std::string name = fresh_identifier(idx, "v", rng);
    EXPECT_EQ(name.rfind("v", 0), 0u);
    EXPECT_FALSE(java::is_keyword(name));
    EXPECT_TRUE(seen.insert(name).second) << name;
  }
}

TEST(ApplyOperator, EachOperatorInjectsItsElementKind) {
  const SourceSet src = single_file("shop/Cart.java", kProgram);
  const std::map<OperatorId, std::string> kinds = {
      {OperatorId::AF, "field"},         {OperatorId::CO, "comment"},
      {OperatorId::IC, "inner_class"},   {OperatorId::JI, "import"},
      {OperatorId::LVD, "local_variable"}, {OperatorId::TLC, "top_level_class"}};
  for (OperatorId op : kAllOperators) {
    SCOPED_TRACE(std::string(to_string(op)));
    const MetamorphicVariant v = apply_operator(src, op, 42, "cart");
    ASSERT_EQ(v.manifest.size(), 1u);
    const InjectedElement& e = v.manifest[0];
    EXPECT_EQ(e.kind, kinds.at(op));
    EXPECT_EQ(e.file, "shop/Cart.java");
    EXPECT_NE(v.transformed_original, src);
    EXPECT_EQ(v.transformed_original.files[0].content.substr(e.offset, e.text.size()), e.text);
    EXPECT_EQ(v.variant_tag(), "mt:42:" + std::string(to_string(op)));
    EXPECT_EQ(brace_balance(v.transformed_original), 0u);
  }
  const auto ji = apply_operator(src, OperatorId::JI, 3).manifest[0];
  EXPECT_EQ(ji.text.rfind("import java.util.", 0), 0u);
  EXPECT_GT(ji.offset, std::string(kProgram).find("package"));
  const auto tlc = apply_operator(src, OperatorId::TLC, 3).manifest[0];
  EXPECT_NE(tlc.text.find("\nclass " + tlc.names[0] + " {"), std::string::npos);
  EXPECT_EQ(tlc.text.find("public"), std::string::npos);
}

TEST(ApplyOperator, NoInsertionPoint) {
  const SourceSet iface = single_file("E.java", "enum E { A, B }\n");
  try {
    apply_operator(iface, OperatorId::LVD, 1);
    FAIL();
  } catch (const MetamorphError& e) {
    EXPECT_EQ(e.kind(), MetamorphError::Kind::NoInsertionPoint);
  }
  EXPECT_FALSE(operator_applicable(index_structure(iface), OperatorId::AF));
  EXPECT_TRUE(operator_applicable(index_structure(iface), OperatorId::CO));
}

TEST(ApplyOperator, ImportAvoidsExistingNames) {
  std::string src = "import java.util.List;\nclass A { Map m; Set s; }\n";
  for (int seed = 0; seed < 50; ++seed) {
    const auto e = apply_operator(single_file("A.java", src), OperatorId::JI, seed).manifest[0];
    EXPECT_NE(e.names[0], "List");
    EXPECT_NE(e.names[0], "Map");
    EXPECT_NE(e.names[0], "Set");
  }
}

// Over the fixture programs: every applicable operator, five seeds.
TEST(ApplyOperator, FixtureCorpusProperties) {
  const BugCorpus corpus = reforacle::testing::fixture_corpus();
  int applied = 0;
  for (const BugInstance& inst : corpus.instances()) {
    const StructuralIndex base = index_structure(inst.original);
    for (OperatorId op : kAllOperators) {
      if (!operator_applicable(base, op)) continue;
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 1000ULL, 0xdeadbeefULL}) {
        SCOPED_TRACE(inst.id + " " + std::string(to_string(op)) + " " + std::to_string(seed));
        const MetamorphicVariant v = apply_operator(inst.original, op, seed, inst.id);
        ++applied;
        EXPECT_EQ(restore(v.transformed_original, v.manifest), inst.original);
        EXPECT_EQ(apply_operator(inst.original, op, seed, inst.id).transformed_original,
                  v.transformed_original);
        for (const auto& e : v.manifest) {
          for (const auto& name : e.names) {
            if (op == OperatorId::JI) continue;
            EXPECT_FALSE(base.identifiers.count(name)) << name;
          }
        }
        const StructuralIndex after = index_structure(v.transformed_original);
        const std::size_t extra =
            (op == OperatorId::IC || op == OperatorId::TLC) ? 1 : 0;
        EXPECT_EQ(after.type_count(), base.type_count() + extra);
      }
    }
  }
  EXPECT_GT(applied, 20 * 4 * 5);
}

TEST(TransformCorpus, DeterministicAndCounted) {
  const BugCorpus corpus = reforacle::testing::fixture_corpus();
  const CorpusTransform a = transform_corpus(corpus, 2024);
  const CorpusTransform b = transform_corpus(corpus, 2024);
  ASSERT_EQ(a.variants.size(), b.variants.size());
  for (std::size_t i = 0; i < a.variants.size(); ++i) {
    EXPECT_EQ(a.variants[i].transformed_original, b.variants[i].transformed_original);
    EXPECT_EQ(manifest_text(a.variants[i]), manifest_text(b.variants[i]));
  }
  int total = 0;
  for (const auto& [op, n] : a.operator_counts) total += n;
  EXPECT_EQ(total + static_cast<int>(a.unchanged.size()), 20);
  EXPECT_EQ(a.variants.front().variant_tag().rfind("mt:2024:", 0), 0u);
  const CorpusTransform c = transform_corpus(corpus, 2025);
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.variants.size(), c.variants.size()); ++i) {
    differs = differs || a.variants[i].transformed_original != c.variants[i].transformed_original;
  }
  EXPECT_TRUE(differs);
}

TEST(TransformCorpus, VariantReproducibleFromRecordedSeed) {
  const BugCorpus corpus = reforacle::testing::fixture_corpus();
  for (const MetamorphicVariant& v : transform_corpus(corpus, 99).variants) {
    const BugInstance* base = corpus.find(v.base_instance_id);
    ASSERT_NE(base, nullptr);
    EXPECT_EQ(apply_operator(base->original, v.op, v.seed).transformed_original,
              v.transformed_original);
  }
}

TEST(WriteVariant, DatasetLayoutWithManifest) {
  TempDir dir;
  const BugCorpus corpus = reforacle::testing::fixture_corpus();
  const BugInstance& base = *corpus.find("p01");
  MetamorphicVariant v = apply_operator(base.original, OperatorId::AF, 5, "p01");
  v.master_seed = 77;
  const auto at = write_variant(v, base, dir.path());
  EXPECT_EQ(at, dir.path() / "variants" / "77" / "p01");
  EXPECT_EQ(read_source_tree(at / "original"), v.transformed_original);
  EXPECT_EQ(read_source_tree(at / "resulting"), base.resulting);
  EXPECT_EQ(read_file(at / "test" / "Test.java"), *base.exposing_test);
  const std::string manifest = read_file(at / "manifest");
  EXPECT_NE(manifest.find("operator=AF\n"), std::string::npos);
  EXPECT_NE(manifest.find("master_seed=77\n"), std::string::npos);
  EXPECT_NE(manifest.find("element={\"kind\":\"field\""), std::string::npos);

  const BugInstance vi = variant_instance(v, base);
  EXPECT_EQ(vi.id, base.id);
  EXPECT_EQ(vi.original, v.transformed_original);
  EXPECT_EQ(vi.resulting, base.resulting);
  EXPECT_EQ(vi.label, base.label);
}

}  // namespace
}  // namespace reforacle::mt
