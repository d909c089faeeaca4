// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "metric_oracle.hpp"
#include "model_outputs.hpp"
#include "reference_fixtures.hpp"
#include "reforacle/analytics.hpp"
#include "reforacle/assessor.hpp"
#include "reforacle/metamorph.hpp"
#include "reforacle/pipeline.hpp"
#include "reforacle/stats.hpp"
#include "reforacle/verdict_parser.hpp"
#include "stats_oracle.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace reforacle;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

// Collects failed checks of one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << std::setprecision(6) << got << ", want " << want << " +/- " << tol;
    expect(std::fabs(got - want) <= tol, os.str());
  }
  void rel(double got, double want, double tol, const std::string& what) {
    near(got, want, std::fabs(want) * tol, what);
  }

  Outcome result(const std::string& summary) const {
    if (!failed_) return {Status::Pass, summary + " (" + std::to_string(checks_) + " checks)"};
    std::string d;
    for (const auto& f : failures_) d += (d.empty() ? "" : "; ") + f;
    return {Status::Fail, d};
  }

 private:
  int checks_ = 0;
  bool failed_ = false;
  std::vector<std::string> failures_;
};

int failures = 0;

void report(const std::string& id, const std::string& title, double limit_s,
            const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Status::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.status == Status::Pass && limit_s > 0 && secs > limit_s) {
    o = {Status::Fail, "runtime " + std::to_string(secs) + " s exceeds " + std::to_string(limit_s) + " s"};
  }
  const char* label = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
  if (o.status == Status::Fail) ++failures;
  std::cout << "[" << label << "] " << std::left << std::setw(4) << id << title << " ("
            << std::fixed << std::setprecision(2) << secs << " s): " << o.detail << std::endl;
}

Outcome statistics_exact() {
  Checker c;
  struct Ci { long k; double lo, hi; };
  for (const Ci& r : {Ci{182, 0.749, 0.852}, Ci{212, 0.899, 0.963}, Ci{214, 0.909, 0.969},
                      Ci{225, 0.975, 0.999}}) {
    const stats::Interval ci = stats::wilson_ci(r.k, 226, 0.95);
    c.near(ci.lower, r.lo, 0.001, "wilson lower " + std::to_string(r.k));
    c.near(ci.upper, r.hi, 0.001, "wilson upper " + std::to_string(r.k));
  }
  struct Mc { stats::PairedCounts counts; double p, delta; };
  const Mc rows[] = {{{169, 13, 43, 1}, 7.33e-5, -0.133},
                     {{174, 8, 40, 4}, 3.31e-6, -0.142},
                     {{202, 10, 12, 2}, 0.832, -0.009}};
  std::vector<double> ps;
  for (const Mc& r : rows) {
    const stats::TestResult t = stats::mcnemar_exact(r.counts);
    c.rel(t.p_value, r.p, 0.01, "mcnemar p");
    c.near(t.delta.value_or(NAN), r.delta, 0.001, "mcnemar delta");
    ps.push_back(t.p_value);
  }
  const auto holm = stats::holm_correct(ps);
  const double want[] = {1.47e-4, 9.92e-6, 0.832};
  for (int i = 0; i < 3; ++i) c.rel(holm[i], want[i], 0.01, "holm " + std::to_string(i));
  return c.result("4 Wilson intervals, 3 McNemar tests, Holm");
}

Outcome cochran_random() {
  Checker c;
  std::mt19937_64 gen(424242);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + gen() % 8, m = 2 + gen() % 3;
    std::vector<std::vector<bool>> rows(n, std::vector<bool>(m));
    for (auto& r : rows) {
      for (std::size_t j = 0; j < m; ++j) r[j] = gen() % 2;
    }
    const stats::TestResult q = stats::cochran_q(rows);
    const double want = testing::oracle::cochran_q(rows);
    if (std::isfinite(want)) {
      c.near(q.statistic, want, 1e-9, "Q matrix " + std::to_string(t));
    } else {
      c.expect(q.degenerate && q.p_value == 1.0, "degenerate matrix " + std::to_string(t));
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    for (auto& r : shuffled) {
      std::vector<bool> p(m);
      for (std::size_t j = 0; j < m; ++j) p[j] = r[perm[j]];
      r = p;
    }
    c.near(stats::cochran_q(shuffled).statistic, q.statistic, 1e-9,
           "permutation " + std::to_string(t));
  }
  // The three-model Q follows from the reference solved sets.
  const auto runs = testing::coverage_fixture();
  std::vector<std::vector<bool>> three;
  for (int i = 1; i <= 226; ++i) {
    const std::string id = "b" + std::to_string(i);
    three.push_back({runs[3].second.count(id) > 0, runs[1].second.count(id) > 0,
                     runs[2].second.count(id) > 0});
  }
  c.near(stats::cochran_q(three).statistic, 30.60, 0.005, "Q on coverage fixture");
  return c.result("200 random matrices vs textbook formula and permutations; Q=30.60 on coverage fixture");
}

Outcome metrics_oracle() {
  Checker c;
  std::mt19937_64 gen(777);
  using analytics::AgreementBasis;
  for (int t = 0; t < 500; ++t) {
    const analytics::RunMatrix m = testing::random_matrix(gen);
    const std::string tag = "fixture " + std::to_string(t);
    c.near(analytics::mean_accuracy(m), testing::oracle::mean_accuracy(m), 1e-12, tag + " mean");
    c.near(analytics::accuracy_spread(m), testing::oracle::accuracy_spread(m), 1e-12, tag + " spread");
    for (int k = 1; k <= m.attempts; ++k) {
      const std::string tk = tag + " k=" + std::to_string(k);
      c.near(analytics::acc_at(m, k), testing::oracle::acc_at(m, k), 1e-12, tk + " acc");
      c.near(analytics::tar_at(m, k), testing::oracle::tar_at(m, k, false), 1e-12, tk + " tar");
      c.near(analytics::cons_at(m, k), testing::oracle::cons_at(m, k, false), 1e-12, tk + " cons");
      c.near(analytics::tar_at(m, k, AgreementBasis::Correctness),
             testing::oracle::tar_at(m, k, true), 1e-12, tk + " tar/correctness");
      c.near(analytics::cons_at(m, k, AgreementBasis::Correctness),
             testing::oracle::cons_at(m, k, true), 1e-12, tk + " cons/correctness");
      if (k > 1) {
        c.expect(analytics::acc_at(m, k) >= analytics::acc_at(m, k - 1), tk + " acc monotone");
        c.expect(analytics::tar_at(m, k) <= analytics::tar_at(m, k - 1), tk + " tar monotone");
      }
    }
    c.expect(analytics::cons_at(m, 1) == analytics::acc_at(m, 1), tag + " cons(1)=acc(1)");
  }
  return c.result("500 random matrices vs brute force, monotonicity");
}

Outcome curve_fixture() {
  Checker c;
  const analytics::RunMatrix m = testing::curve_fixture();
  c.expect(m.rows() == 226 && m.attempts == 5, "fixture shape");
  const double acc[] = {0.805, 0.858, 0.912, 0.925, 0.929};
  std::ostringstream got;
  for (int k = 1; k <= 5; ++k) {
    const double a = analytics::acc_at(m, k);
    c.near(a, acc[k - 1], 0.001, "acc@" + std::to_string(k));
    got << (k > 1 ? "/" : "") << std::fixed << std::setprecision(3) << a;
  }
  return c.result("Acc@1..5 = " + got.str());
}

Outcome venn_regions() {
  Checker c;
  const analytics::UnionReport u = analytics::union_coverage(testing::coverage_fixture());
  std::size_t sum = 0;
  for (const auto& r : testing::kCoverageRegions) {
    c.expect(u.region(r.models) == static_cast<std::size_t>(r.count),
             "region of size " + std::to_string(r.count));
    sum += r.count;
  }
  c.expect(u.regions.size() == testing::kCoverageRegions.size(), "no extra regions");
  c.expect(u.union_size == sum && sum == 226, "union size");
  return c.result("8 regions, union " + std::to_string(u.union_size));
}

struct MetamorphRun {
  int variants = 0;
  Checker restore, fresh, compiles, pattern;
  bool jdk = false;
};

MetamorphRun& metamorph_run() {
  static MetamorphRun run = [] {
    MetamorphRun r;
    const BugCorpus corpus = testing::fixture_corpus();
    auto jdk = testing::real_jdk();
    r.jdk = jdk != nullptr;
    testing::TempDir work;
    if (jdk) jdk->set_workspace_root(work.path());
    for (const BugInstance& inst : corpus.instances()) {
      const mt::StructuralIndex base = mt::index_structure(inst.original);
      std::optional<exec::DiscriminationResult> reference;
      if (jdk && inst.exposing_test) {
        reference = exec::check_discriminating(*jdk, *inst.exposing_test, inst.original,
                                               inst.resulting, inst.id + "-ref");
      }
      for (mt::OperatorId op : mt::kAllOperators) {
        if (!mt::operator_applicable(base, op)) continue;
        for (std::uint64_t seed : {11ULL, 22ULL, 33ULL, 44ULL, 55ULL}) {
          const std::string tag = inst.id + "/" + std::string(mt::to_string(op)) + "/" + std::to_string(seed);
          const mt::MetamorphicVariant v = mt::apply_operator(inst.original, op, seed, inst.id);
          ++r.variants;
          r.restore.expect(mt::restore(v.transformed_original, v.manifest) == inst.original, tag);
          for (const auto& e : v.manifest) {
            for (const auto& name : e.names) {
              if (op != mt::OperatorId::JI) r.fresh.expect(!base.identifiers.count(name), tag + " " + name);
            }
          }
          if (!jdk) continue;
          exec::Workspace ws = exec::Workspace::create(work.path(), inst.id + "-variant");
          r.compiles.expect(jdk->compile(v.transformed_original, ws).success, tag);
          if (reference) {
            const auto d = exec::check_discriminating(*jdk, *inst.exposing_test, v.transformed_original,
                                                      inst.resulting, inst.id + "-mt");
            r.pattern.expect(d.on_original.outcome == reference->on_original.outcome &&
                                 d.on_resulting.outcome == reference->on_resulting.outcome,
                             tag);
          }
        }
      }
    }
    return r;
  }();
  return run;
}

Outcome no_jdk() {
  return {Status::Skip,
          "needs javac/java and JUnit 4 (set REFORACLE_JUNIT_CP); not available in this environment"};
}

Outcome assessor_truth_table() {
  Checker c;
  for (Label truth : {Label::BC, Label::CE, Label::Preserving}) {
    for (AnswerLabel a : kAllAnswerLabels) {
      for (bool evidence : {false, true}) {
        const bool want = (truth == Label::CE && a == AnswerLabel::SaidCE) ||
                          (truth == Label::BC && a == AnswerLabel::SaidBCValid && evidence) ||
                          (truth == Label::Preserving && a == AnswerLabel::SaidYes);
        c.expect(is_correct(truth, a, evidence) == want,
                 std::string(to_string(truth)) + "/" + std::string(to_string(a)));
        if (a == AnswerLabel::SaidYes && truth != Label::Preserving) {
          c.expect(!is_correct(truth, a, evidence), "YES on BC/CE");
        }
      }
    }
  }
  // The same rules through assess() with scripted execution results.
  testing::TempDir dir;
  exec::MockToolchain mock;
  mock.set_workspace_root(dir.path());
  const std::string test = testing::kPushDownTest;
  using exec::TestOutcome;
  const TestOutcome outcomes[] = {TestOutcome::Pass, TestOutcome::Fail, TestOutcome::Error,
                                  TestOutcome::Timeout, TestOutcome::DidNotCompile};
  for (Label truth : {Label::BC, Label::CE, Label::Preserving}) {
    BugInstance inst;
    inst.id = "x";
    inst.label = truth;
    inst.original = testing::single_file("A.java", "class A { int v() { return 1; } }");
    inst.resulting = testing::single_file("A.java", "class A { int v() { return 2; } }");
    if (truth == Label::BC) inst.exposing_test = test;
    for (Verdict claim : {Verdict::Yes, Verdict::NoCompilationError, Verdict::NoBehaviorChange, Verdict::Unknown}) {
      for (TestOutcome on_o : outcomes) {
        for (TestOutcome on_r : outcomes) {
          mock.script_test(inst.original, test, {on_o, "", {}});
          mock.script_test(inst.resulting, test, {on_r, "", {}});
          ModelVerdict v;
          v.category = claim;
          v.explanation = "x.";
          if (claim == Verdict::NoBehaviorChange) v.junit_test = test;
          const AssessmentOutcome o = assess(inst, v, mock);
          const bool discriminating = o.evidence && o.evidence->discriminates;
          c.expect(o.correct == is_correct(truth, o.answer_label, discriminating), "assess consistency");
          if (o.answer_label == AnswerLabel::SaidBCValid) c.expect(discriminating, "BC_VALID without evidence");
          if (truth == Label::BC && claim == Verdict::NoBehaviorChange) {
            const bool compiled = on_o != TestOutcome::DidNotCompile && on_r != TestOutcome::DidNotCompile;
            const bool disc = compiled && ((on_o == TestOutcome::Pass) != (on_r == TestOutcome::Pass));
            c.expect(o.correct == disc, "BC claim correctness follows discrimination");
          }
          if (truth == Label::Preserving) c.expect(o.correct == (claim == Verdict::Yes), "PRESERVING iff YES");
          if (truth == Label::CE) c.expect(o.correct == (claim == Verdict::NoCompilationError), "CE iff CE");
        }
      }
    }
  }
  return c.result("3 labels x 7 answer labels x evidence, plus assess() over 300 scripted runs");
}

Outcome executor_e2e() {
  auto jdk = testing::real_jdk();
  if (!jdk) return no_jdk();
  Checker c;
  testing::TempDir dir;
  jdk->set_workspace_root(dir.path());
  const BugCorpus corpus = testing::fixture_corpus();
  const BugInstance& push_down = *corpus.find("p01");
  const auto d = exec::check_discriminating(*jdk, *push_down.exposing_test, push_down.original, push_down.resulting);
  c.expect(d.discriminates, "push-down test discriminates");
  const BugInstance& inline_var = *corpus.find("p02");
  exec::Workspace ws = exec::Workspace::create(dir.path(), "inline_var");
  c.expect(!jdk->compile(inline_var.resulting, ws).success, "inline-variable result fails to compile");
  const std::string vacuous =
      "import org.junit.Test;\nimport static org.junit.Assert.assertTrue;\n"
      "public class VacuousTest {\n  @Test public void nothing() { assertTrue(true); }\n}\n";
  c.expect(!exec::check_discriminating(*jdk, vacuous, push_down.original, push_down.resulting).discriminates,
           "vacuous test does not discriminate");
  return c.result("discriminating test, compile failure, vacuous test");
}

Outcome pipeline_determinism() {
  Checker c;
  testing::TempDir dir;
  const fs::path corpus_root = testing::small_corpus(dir / "corpus", 10);
  const BugCorpus corpus = load_corpus(corpus_root);
  auto toolchain = testing::scripted_toolchain(corpus);
  toolchain->set_workspace_root(dir / "work");
  auto config = [&](const std::string& out) {
    RunConfig cfg;
    cfg.corpus_root = corpus_root;
    cfg.backends = {testing::scripted_mock(corpus, 4)};
    cfg.attempts = 4;
    cfg.out_dir = dir / out;
    cfg.toolchain = toolchain.get();
    return cfg;
  };
  RunConfig rec = config("record");
  rec.record_path = dir / "store.jsonl";
  run_benchmark(rec);

  RunConfig a = config("a"), b = config("b");
  a.replay_path = b.replay_path = rec.record_path;
  b.jobs = 4;
  run_benchmark(a);
  run_benchmark(b);
  const std::string first = testing::without_timestamps(read_file(a.out_dir / "outcomes.jsonl"));
  c.expect(first == testing::without_timestamps(read_file(b.out_dir / "outcomes.jsonl")),
           "two replay runs differ");
  c.expect(!first.empty(), "no outcomes");

  RunConfig part = config("part");
  part.replay_path = rec.record_path;
  part.stop_after = 20;  // half of 10 x 4
  const RunArtifacts cut = run_benchmark(part);
  c.expect(cut.interrupted && cut.executed == 20, "interruption at 50%");
  part.stop_after.reset();
  run_benchmark(part);
  std::set<std::string> full_keys, resumed_keys;
  for (const auto& o : load_outcomes(a.out_dir / "outcomes.jsonl")) full_keys.insert(o.key());
  for (const auto& o : load_outcomes(part.out_dir / "outcomes.jsonl")) resumed_keys.insert(o.key());
  c.expect(full_keys.size() == 40 && full_keys == resumed_keys, "resumed key set differs");
  c.expect(testing::without_timestamps(read_file(part.out_dir / "outcomes.jsonl")) == first,
           "resumed records differ");
  return c.result("10 instances x 4 attempts, replayed twice, interrupted at 20/40 and resumed");
}

Outcome verdict_parser() {
  Checker c;
  auto category = [](const ParseResult& r) -> std::optional<Verdict> {
    if (const auto* v = std::get_if<ModelVerdict>(&r)) return v->category;
    return std::nullopt;
  };
  const ParseResult bc = parse_response(testing::behavior_change_output(), PromptKind::FullSource);
  c.expect(category(bc) == Verdict::NoBehaviorChange, "behavior-change box");
  if (const auto* v = std::get_if<ModelVerdict>(&bc)) {
    c.expect(v->junit_test.has_value() && v->junit_test->find("testMBehavior") != std::string::npos,
             "behavior-change box carries the test");
  }
  c.expect(category(parse_response(testing::kCompilationErrorOutput, PromptKind::FullSource)) ==
               Verdict::NoCompilationError,
           "compilation-error box");
  c.expect(category(parse_response(testing::kYesOutput, PromptKind::FullSource)) == Verdict::Yes,
           "YES box");

  std::mt19937_64 gen(99);
  const std::string seeds[] = {testing::behavior_change_output(), testing::kCompilationErrorOutput,
                               testing::kYesOutput};
  const std::string noise = "{}[]\":,\\ \n\tYESNO-abc`";
  int verdicts = 0, failures = 0;
  for (int i = 0; i < 100; ++i) {
    std::string s = seeds[i % 3];
    const int edits = 1 + static_cast<int>(gen() % 4);
    for (int e = 0; e < edits && !s.empty(); ++e) {
      const std::size_t at = gen() % s.size();
      switch (gen() % 3) {
        case 0: s.erase(at, 1 + gen() % 3); break;
        case 1: s.insert(at, 1, noise[gen() % noise.size()]); break;
        default: s[at] = noise[gen() % noise.size()]; break;
      }
    }
    try {
      const ParseResult r = parse_response(s, i % 2 ? PromptKind::FullSource : PromptKind::DiffOnly);
      c.expect(r.index() == 0 || r.index() == 1, "fuzz result");
      (r.index() == 0 ? verdicts : failures)++;
    } catch (const std::exception& e) {
      c.expect(false, std::string("fuzz input threw: ") + e.what());
    }
  }
  return c.result("3 boxes; 100 fuzz strings -> " + std::to_string(verdicts) + " verdicts, " +
                  std::to_string(failures) + " parse failures");
}

}  // namespace

int main() {
  report("1", "statistics, exact reproduction", 1.0, statistics_exact);
  report("2", "Cochran's Q oracle and permutation invariance", 5.0, cochran_random);
  report("3", "metrics engine vs definitional oracle", 10.0, metrics_oracle);
  report("4", "metrics engine on reference Acc@ curve", 1.0, curve_fixture);
  report("5", "mixture-of-experts union regions", 1.0, venn_regions);
  const bool jdk = testing::real_jdk() != nullptr;
  report("6a", "metamorphic variants compile", 0, [&] {
    if (!jdk) return no_jdk();
    return metamorph_run().compiles.result(std::to_string(metamorph_run().variants) + " variants");
  });
  report("6b", "metamorphic manifests restore originals byte-for-byte", 0, [] {
    return metamorph_run().restore.result(std::to_string(metamorph_run().variants) + " variants");
  });
  report("6c", "metamorphic identifiers are fresh", 0, [] {
    return metamorph_run().fresh.result(std::to_string(metamorph_run().variants) + " variants");
  });
  report("6d", "metamorphic variants keep the BC test pattern", 0, [&] {
    if (!jdk) return no_jdk();
    return metamorph_run().pattern.result("BC fixtures");
  });
  report("7", "assessor truth table", 1.0, assessor_truth_table);
  report("8", "executor end-to-end with JDK", 30.0, executor_e2e);
  report("9", "pipeline determinism and resume", 20.0, pipeline_determinism);
  report("10", "verdict parser boxes and fuzzing", 1.0, verdict_parser);
  std::cout << (failures == 0 ? "acceptance: no failures" : "acceptance: " + std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
