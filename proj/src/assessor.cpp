#include "reforacle/assessor.hpp"

namespace reforacle {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxRunnerOutput = 4000;

AssessmentOutcome base_outcome(const BugInstance& inst) {
  AssessmentOutcome o;
  o.instance_id = inst.id;
  o.ground_truth = inst.label;
  o.refactoring_type = inst.refactoring_type;
  o.tool = std::string(to_string(inst.tool));
  return o;
}

// Fills parse-related fields; returns the verdict when parsing succeeded.
const ModelVerdict* absorb_parse(AssessmentOutcome& o, const ParseResult& result) {
  if (const auto* failure = std::get_if<ParseFailure>(&result)) {
    o.answer_label = AnswerLabel::ParseError;
    o.parse_failure = std::string(to_string(failure->reason));
    o.parse_excerpt = failure->excerpt;
    return nullptr;
  }
  const auto& v = std::get<ModelVerdict>(result);
  o.claimed = v.category;
  o.explanation = v.explanation;
  o.explanation_sentences = v.explanation_sentences;
  o.noise_stripped = v.noise_stripped;
  o.missing_test = v.missing_test;
  return &v;
}

// Labels a behavior-change claim by executing its test on both versions.
void label_bc_claim(AssessmentOutcome& o, const ModelVerdict& v, const BugInstance& inst,
                    exec::JavaToolchain* toolchain) {
  const TestExtraction test = extract_test_source(v);
  if (test.status != TestExtraction::Status::Ok) {
    o.malformed_test = test.status == TestExtraction::Status::Malformed;
    o.answer_label = AnswerLabel::SaidBCTestNotCompiling;
    return;
  }
  o.reflective_test = exec::uses_reflection(test.code);
  if (toolchain == nullptr) {
    o.answer_label = AnswerLabel::SaidBCTestNotDiscriminating;
    return;
  }
  try {
    o.toolchain_version = toolchain->version();
    const std::string tag = inst.id + "-a" + std::to_string(o.attempt_index);
    exec::DiscriminationResult d =
        exec::check_discriminating(*toolchain, test.code, inst.original, inst.resulting, tag);
    const bool compiled = d.on_original.outcome != exec::TestOutcome::DidNotCompile &&
                          d.on_resulting.outcome != exec::TestOutcome::DidNotCompile;
    if (!compiled) {
      o.answer_label = AnswerLabel::SaidBCTestNotCompiling;
    } else if (d.discriminates && !o.reflective_test) {
      o.answer_label = AnswerLabel::SaidBCValid;
    } else {
      o.answer_label = AnswerLabel::SaidBCTestNotDiscriminating;
    }
    o.evidence = std::move(d);
  } catch (const std::exception& e) {
    // The claim could not be checked; keep a label but drop the row from metrics.
    o.answer_label = AnswerLabel::SaidBCTestNotDiscriminating;
    o.inconclusive = true;
    o.error = e.what();
  }
}

json to_json(const exec::TestRunResult& r) {
  std::string output = r.runner_output.substr(0, kMaxRunnerOutput);
  return {{"outcome", exec::to_string(r.outcome)},
          {"elapsed_ms", r.elapsed.count()},
          {"output", output}};
}

exec::TestRunResult run_result_from_json(const json& j) {
  exec::TestRunResult r;
  r.outcome = exec::test_outcome_from_string(j.at("outcome").get<std::string>());
  r.elapsed = std::chrono::milliseconds(j.value("elapsed_ms", 0L));
  r.runner_output = j.value("output", "");
  return r;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> read_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string_view to_string(AnswerLabel label) {
  switch (label) {
    case AnswerLabel::SaidYes: return "SAID_YES";
    case AnswerLabel::SaidCE: return "SAID_CE";
    case AnswerLabel::SaidBCValid: return "SAID_BC_VALID";
    case AnswerLabel::SaidBCTestNotCompiling: return "SAID_BC_TEST_NOT_COMPILING";
    case AnswerLabel::SaidBCTestNotDiscriminating: return "SAID_BC_TEST_NOT_DISCRIMINATING";
    case AnswerLabel::SaidUnknown: return "SAID_UNKNOWN";
    case AnswerLabel::ParseError: return "PARSE_ERROR";
  }
  return "PARSE_ERROR";
}

std::optional<AnswerLabel> answer_label_from_string(std::string_view text) {
  for (AnswerLabel l : kAllAnswerLabels) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

bool is_correct(Label ground_truth, AnswerLabel answer, bool discriminating_evidence) {
  switch (ground_truth) {
    case Label::CE: return answer == AnswerLabel::SaidCE;
    case Label::BC: return answer == AnswerLabel::SaidBCValid && discriminating_evidence;
    case Label::Preserving: return answer == AnswerLabel::SaidYes;
  }
  return false;
}

std::string AssessmentOutcome::key() const {
  return RequestKey{backend_name, instance_id, variant_tag, attempt_index, prompt_hash}.str();
}

AssessmentOutcome assess(const BugInstance& inst, const ParseResult& verdict,
                         exec::JavaToolchain& toolchain) {
  if (inst.label == Label::Preserving) return assess_preserving(inst, verdict, &toolchain);
  AssessmentOutcome o = base_outcome(inst);
  const ModelVerdict* v = absorb_parse(o, verdict);
  if (v != nullptr) {
    switch (v->category) {
      case Verdict::Yes: o.answer_label = AnswerLabel::SaidYes; break;
      case Verdict::NoCompilationError: o.answer_label = AnswerLabel::SaidCE; break;
      case Verdict::Unknown: o.answer_label = AnswerLabel::SaidUnknown; break;
      case Verdict::NoBehaviorChange:
        if (inst.label == Label::BC) {
          label_bc_claim(o, *v, inst, &toolchain);
        } else {
          // The resulting program does not compile, so no test can compile
          // against both versions.
          const TestExtraction test = extract_test_source(*v);
          o.malformed_test = test.status == TestExtraction::Status::Malformed;
          if (test.status == TestExtraction::Status::Ok) {
            o.reflective_test = exec::uses_reflection(test.code);
          }
          o.answer_label = AnswerLabel::SaidBCTestNotCompiling;
        }
        break;
    }
  }
  o.correct = !o.inconclusive &&
              is_correct(o.ground_truth, o.answer_label, o.evidence && o.evidence->discriminates);
  return o;
}

AssessmentOutcome assess_preserving(const BugInstance& inst, const ParseResult& verdict,
                                    exec::JavaToolchain* toolchain) {
  AssessmentOutcome o = base_outcome(inst);
  const ModelVerdict* v = absorb_parse(o, verdict);
  if (v != nullptr) {
    switch (v->category) {
      case Verdict::Yes: o.answer_label = AnswerLabel::SaidYes; break;
      case Verdict::NoCompilationError: o.answer_label = AnswerLabel::SaidCE; break;
      case Verdict::Unknown: o.answer_label = AnswerLabel::SaidUnknown; break;
      case Verdict::NoBehaviorChange: label_bc_claim(o, *v, inst, toolchain); break;
    }
  }
  o.correct = !o.inconclusive &&
              is_correct(o.ground_truth, o.answer_label, o.evidence && o.evidence->discriminates);
  return o;
}

void attach_response(AssessmentOutcome& o, const RawModelResponse& resp) {
  o.latency_s = resp.latency_s;
  o.tokens_in = resp.tokens_in;
  o.tokens_out = resp.tokens_out;
  o.tokens_reasoning = resp.tokens_reasoning;
  o.cost_estimate = resp.cost_estimate;
  o.created_at = resp.created_at;
}

json to_json(const AssessmentOutcome& o) {
  json evidence = nullptr;
  if (o.evidence) {
    evidence = {{"on_original", to_json(o.evidence->on_original)},
                {"on_resulting", to_json(o.evidence->on_resulting)},
                {"discriminates", o.evidence->discriminates},
                {"direction", exec::to_string(o.evidence->direction)}};
  }
  return {
      {"schema", kOutcomeSchema},
      {"key", o.key()},
      {"instance_id", o.instance_id},
      {"attempt_index", o.attempt_index},
      {"backend_name", o.backend_name},
      {"variant_tag", o.variant_tag},
      {"ground_truth", to_string(o.ground_truth)},
      {"refactoring_type", o.refactoring_type},
      {"tool", o.tool},
      {"answer_label", to_string(o.answer_label)},
      {"correct", o.correct},
      {"inconclusive", o.inconclusive},
      {"call_failed", o.call_failed},
      {"error", o.error},
      {"claimed", o.claimed ? json(to_string(*o.claimed)) : json(nullptr)},
      {"explanation", o.explanation},
      {"explanation_sentences", o.explanation_sentences},
      {"parse_failure", opt(o.parse_failure)},
      {"parse_excerpt", o.parse_excerpt},
      {"noise_stripped", o.noise_stripped},
      {"missing_test", o.missing_test},
      {"malformed_test", o.malformed_test},
      {"reflective_test", o.reflective_test},
      {"evidence", evidence},
      {"latency_s", o.latency_s},
      {"tokens_in", opt(o.tokens_in)},
      {"tokens_out", opt(o.tokens_out)},
      {"tokens_reasoning", opt(o.tokens_reasoning)},
      {"cost_estimate", opt(o.cost_estimate)},
      {"created_at", o.created_at},
      {"mode", o.mode},
      {"prompt_hash", o.prompt_hash},
      {"template_version", o.template_version},
      {"toolchain_version", o.toolchain_version},
      {"seed", opt(o.seed)},
  };
}

AssessmentOutcome outcome_from_json(const json& j) {
  if (j.value("schema", 0) != kOutcomeSchema) {
    throw std::runtime_error("outcome record has unsupported schema " +
                             j.value("schema", json(nullptr)).dump());
  }
  AssessmentOutcome o;
  o.instance_id = j.at("instance_id").get<std::string>();
  o.attempt_index = j.at("attempt_index").get<int>();
  o.backend_name = j.at("backend_name").get<std::string>();
  o.variant_tag = j.value("variant_tag", "");
  const auto label = label_from_string(j.at("ground_truth").get<std::string>());
  if (!label) throw std::runtime_error("outcome record has unknown ground_truth");
  o.ground_truth = *label;
  o.refactoring_type = j.value("refactoring_type", "");
  o.tool = j.value("tool", "");
  const auto answer = answer_label_from_string(j.at("answer_label").get<std::string>());
  if (!answer) throw std::runtime_error("outcome record has unknown answer_label");
  o.answer_label = *answer;
  o.correct = j.at("correct").get<bool>();
  o.inconclusive = j.value("inconclusive", false);
  o.call_failed = j.value("call_failed", false);
  o.error = j.value("error", "");
  if (auto c = read_opt<std::string>(j, "claimed")) o.claimed = verdict_from_string(*c);
  o.explanation = j.value("explanation", "");
  o.explanation_sentences = j.value("explanation_sentences", 0);
  o.parse_failure = read_opt<std::string>(j, "parse_failure");
  o.parse_excerpt = j.value("parse_excerpt", "");
  o.noise_stripped = j.value("noise_stripped", false);
  o.missing_test = j.value("missing_test", false);
  o.malformed_test = j.value("malformed_test", false);
  o.reflective_test = j.value("reflective_test", false);
  if (auto it = j.find("evidence"); it != j.end() && !it->is_null()) {
    exec::DiscriminationResult d = exec::make_discrimination(
        run_result_from_json(it->at("on_original")), run_result_from_json(it->at("on_resulting")));
    o.evidence = std::move(d);
  }
  o.latency_s = j.value("latency_s", 0.0);
  o.tokens_in = read_opt<long>(j, "tokens_in");
  o.tokens_out = read_opt<long>(j, "tokens_out");
  o.tokens_reasoning = read_opt<long>(j, "tokens_reasoning");
  o.cost_estimate = read_opt<double>(j, "cost_estimate");
  o.created_at = j.value("created_at", "");
  o.mode = j.value("mode", "");
  o.prompt_hash = j.value("prompt_hash", "");
  o.template_version = j.value("template_version", "");
  o.toolchain_version = j.value("toolchain_version", "");
  o.seed = read_opt<std::uint64_t>(j, "seed");
  return o;
}

}  // namespace reforacle
