#include "reforacle/summary.hpp"

#include <map>
#include <sstream>

#include "reforacle/model_client.hpp"
#include "reforacle/pipeline.hpp"
#include "reforacle/source_set.hpp"

namespace fs = std::filesystem;

namespace reforacle {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

std::string ratio(int num, int den) { return den == 0 ? "" : fmt(static_cast<double>(num) / den); }

struct Tally {
  int n = 0;
  int correct = 0;
  void add(bool ok) {
    ++n;
    correct += ok ? 1 : 0;
  }
};

}  // namespace

SummaryTables summarize(const std::vector<AssessmentOutcome>& outcomes, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  SummaryTables tables;
  if (outcomes.empty()) tables.warnings.push_back("outcomes file is empty; tables contain headers only");

  // Runs keyed by backend and metamorphic family, in first-appearance order.
  std::vector<std::string> runs;
  std::map<std::string, std::vector<const AssessmentOutcome*>> by_run;
  for (const AssessmentOutcome& o : outcomes) {
    std::string tag = o.variant_tag;
    if (tag.starts_with("mt:")) tag = tag.substr(0, tag.rfind(':'));
    const std::string name = tag.empty() ? o.backend_name : o.backend_name + "[" + tag + "]";
    if (!by_run.count(name)) runs.push_back(name);
    by_run[name].push_back(&o);
  }

  std::ostringstream acc;
  acc << "backend,n,correct,accuracy,bc_n,bc_accuracy,ce_n,ce_accuracy,preserving_n,"
         "preserving_accuracy,unknown,inconclusive_excluded\n";
  std::ostringstream heat;
  heat << "backend,refactoring_type,n,correct,accuracy\n";
  std::ostringstream tax;
  tax << "backend,ground_truth,answer_label,count\n";
  std::ostringstream tel;
  tel << "backend,calls,total_latency_s,mean_latency_s,median_latency_s,min_latency_s,"
         "max_latency_s,tokens_in,tokens_out,tokens_reasoning,cost\n";
  std::ostringstream adj;
  adj << "backend,instance_id,attempt,answer_label,claimed,explanation,decision\n";

  int excluded_total = 0;
  for (const std::string& name : runs) {
    Tally all;
    std::map<Label, Tally> per_label;
    std::map<std::string, Tally> per_type;
    std::map<std::pair<Label, AnswerLabel>, int> taxonomy;
    std::vector<RawModelResponse> calls;
    int unknown = 0;
    int excluded = 0;
    for (const AssessmentOutcome* o : by_run[name]) {
      if (!o->call_failed) {
        RawModelResponse r;
        r.latency_s = o->latency_s;
        r.tokens_in = o->tokens_in;
        r.tokens_out = o->tokens_out;
        r.tokens_reasoning = o->tokens_reasoning;
        r.cost_estimate = o->cost_estimate;
        calls.push_back(r);
      }
      if (o->mode == "diff" && o->claimed) {
        adj << csv_field(o->backend_name) << ',' << csv_field(o->instance_id) << ','
            << o->attempt_index << ',' << to_string(o->answer_label) << ','
            << to_string(*o->claimed) << ',' << csv_field(o->explanation) << ",\n";
      }
      if (o->attempt_index != 1) continue;
      if (o->inconclusive) {
        ++excluded;
        continue;
      }
      all.add(o->correct);
      per_label[o->ground_truth].add(o->correct);
      per_type[o->refactoring_type].add(o->correct);
      ++taxonomy[{o->ground_truth, o->answer_label}];
      if (o->answer_label == AnswerLabel::SaidUnknown) ++unknown;
    }
    excluded_total += excluded;
    const Tally& bc = per_label[Label::BC];
    const Tally& ce = per_label[Label::CE];
    const Tally& pr = per_label[Label::Preserving];
    acc << csv_field(name) << ',' << all.n << ',' << all.correct << ',' << ratio(all.correct, all.n)
        << ',' << bc.n << ',' << ratio(bc.correct, bc.n) << ',' << ce.n << ','
        << ratio(ce.correct, ce.n) << ',' << pr.n << ',' << ratio(pr.correct, pr.n) << ','
        << unknown << ',' << excluded << '\n';
    for (const auto& [type, t] : per_type) {
      heat << csv_field(name) << ',' << csv_field(type) << ',' << t.n << ',' << t.correct << ','
           << ratio(t.correct, t.n) << '\n';
    }
    for (const auto& [k, count] : taxonomy) {
      tax << csv_field(name) << ',' << to_string(k.first) << ',' << to_string(k.second) << ','
          << count << '\n';
    }
    const TelemetrySummary s = summarize_telemetry(calls);
    tel << csv_field(name) << ',' << s.calls << ',' << fmt(s.total_latency_s) << ','
        << fmt(s.mean_latency_s) << ',' << fmt(s.median_latency_s) << ',' << fmt(s.min_latency_s)
        << ',' << fmt(s.max_latency_s) << ',' << s.tokens_in << ',' << s.tokens_out << ','
        << s.tokens_reasoning << ',' << fmt(s.cost) << '\n';
  }
  if (excluded_total > 0) {
    tables.warnings.push_back(std::to_string(excluded_total) +
                              " inconclusive first-attempt record(s) excluded from denominators");
  }

  const std::pair<const char*, std::string> files[] = {
      {"accuracy.csv", acc.str()},   {"heatmap.csv", heat.str()},
      {"taxonomy.csv", tax.str()},   {"telemetry.csv", tel.str()},
      {"adjudication.csv", adj.str()},
  };
  for (const auto& [file, body] : files) {
    write_file(out_dir / file, body);
    tables.files.push_back(out_dir / file);
  }
  return tables;
}

SummaryTables summarize_file(const fs::path& outcomes_file, const fs::path& out_dir) {
  return summarize(load_outcomes(outcomes_file), out_dir);
}

}  // namespace reforacle
