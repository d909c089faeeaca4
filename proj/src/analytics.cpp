#include "reforacle/analytics.hpp"

#include <algorithm>
#include <sstream>

namespace reforacle::analytics {

using nlohmann::json;

namespace {

void require_rows(const RunMatrix& m) {
  if (m.rows() == 0 || m.attempts < 1) {
    throw MetricError(MetricError::Kind::EmptyMatrix, "run matrix has no rows");
  }
}

void require_k(const RunMatrix& m, int k) {
  require_rows(m);
  if (k < 1 || k > m.attempts) {
    throw MetricError(MetricError::Kind::KOutOfRange,
                      "k=" + std::to_string(k) + " outside [1, " + std::to_string(m.attempts) + "]");
  }
}

bool same(const Cell& a, const Cell& b, AgreementBasis basis) {
  return basis == AgreementBasis::AnswerLabel ? a.answer == b.answer : a.correct == b.correct;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string_view to_string(AgreementBasis basis) {
  return basis == AgreementBasis::AnswerLabel ? "answer_label" : "correctness";
}

void RunMatrix::validate() const {
  if (instance_ids.size() != cells.size() || labels.size() != cells.size()) {
    throw MetricError(MetricError::Kind::NotRectangular, "ids, labels and rows disagree in size");
  }
  for (const auto& row : cells) {
    if (static_cast<int>(row.size()) != attempts) {
      throw MetricError(MetricError::Kind::NotRectangular,
                        "row with " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(attempts));
    }
  }
}

std::pair<RunMatrix, int> drop_inconclusive(const RunMatrix& m) {
  m.validate();
  RunMatrix out;
  out.backend_name = m.backend_name;
  out.attempts = m.attempts;
  int dropped = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto& row = m.cells[i];
    if (std::any_of(row.begin(), row.end(), [](const Cell& c) { return c.inconclusive; })) {
      ++dropped;
      continue;
    }
    out.instance_ids.push_back(m.instance_ids[i]);
    out.labels.push_back(m.labels[i]);
    out.cells.push_back(row);
  }
  return {std::move(out), dropped};
}

RunMatrix build_matrix(const std::vector<AssessmentOutcome>& outcomes,
                       const std::string& backend_name, const std::string& variant_tag) {
  RunMatrix m;
  m.backend_name = backend_name;
  std::map<std::string, std::size_t> row_of;
  std::vector<std::map<int, Cell>> rows;
  for (const AssessmentOutcome& o : outcomes) {
    if (o.backend_name != backend_name || o.variant_tag != variant_tag) continue;
    auto [it, inserted] = row_of.emplace(o.instance_id, rows.size());
    if (inserted) {
      m.instance_ids.push_back(o.instance_id);
      m.labels.push_back(o.ground_truth);
      rows.emplace_back();
    }
    rows[it->second][o.attempt_index] = Cell{o.answer_label, o.correct, o.inconclusive};
    m.attempts = std::max(m.attempts, o.attempt_index);
  }
  for (const auto& row : rows) {
    std::vector<Cell> cells;
    for (int a = 1; a <= m.attempts; ++a) {
      auto it = row.find(a);
      cells.push_back(it != row.end() ? it->second : Cell{AnswerLabel::ParseError, false, true});
    }
    m.cells.push_back(std::move(cells));
  }
  return m;
}

std::vector<double> per_attempt_accuracy(const RunMatrix& m) {
  require_rows(m);
  std::vector<double> out;
  for (int a = 0; a < m.attempts; ++a) {
    std::size_t hits = 0;
    for (const auto& row : m.cells) hits += row[a].correct ? 1 : 0;
    out.push_back(static_cast<double>(hits) / m.rows());
  }
  return out;
}

double mean_accuracy(const RunMatrix& m) {
  require_rows(m);
  std::size_t hits = 0;
  for (const auto& row : m.cells) {
    for (const Cell& c : row) hits += c.correct ? 1 : 0;
  }
  return static_cast<double>(hits) / (m.rows() * static_cast<std::size_t>(m.attempts));
}

double accuracy_spread(const RunMatrix& m) {
  const auto acc = per_attempt_accuracy(m);
  const auto [lo, hi] = std::minmax_element(acc.begin(), acc.end());
  return *hi - *lo;
}

double acc_at(const RunMatrix& m, int k) {
  require_k(m, k);
  std::size_t solved = 0;
  for (const auto& row : m.cells) {
    if (std::any_of(row.begin(), row.begin() + k, [](const Cell& c) { return c.correct; })) {
      ++solved;
    }
  }
  return static_cast<double>(solved) / m.rows();
}

double tar_at(const RunMatrix& m, int k, AgreementBasis basis) {
  require_k(m, k);
  std::size_t agree = 0;
  for (const auto& row : m.cells) {
    if (std::all_of(row.begin(), row.begin() + k,
                    [&](const Cell& c) { return same(c, row[0], basis); })) {
      ++agree;
    }
  }
  return static_cast<double>(agree) / m.rows();
}

double cons_at(const RunMatrix& m, int k, AgreementBasis basis) {
  require_k(m, k);
  std::size_t hits = 0;
  for (const auto& row : m.cells) {
    for (int i = 0; i < k; ++i) {
      const int votes = static_cast<int>(std::count_if(
          row.begin(), row.begin() + k, [&](const Cell& c) { return same(c, row[i], basis); }));
      if (2 * votes > k) {
        hits += row[i].correct ? 1 : 0;
        break;
      }
    }
  }
  return static_cast<double>(hits) / m.rows();
}

CategoryRates category_split(const RunMatrix& m, int k) {
  require_k(m, k);
  auto restricted = [&](Label label) -> std::optional<double> {
    RunMatrix sub;
    sub.attempts = m.attempts;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m.labels[i] != label) continue;
      sub.instance_ids.push_back(m.instance_ids[i]);
      sub.labels.push_back(label);
      sub.cells.push_back(m.cells[i]);
    }
    if (sub.rows() == 0) return std::nullopt;
    return acc_at(sub, k);
  };
  return {restricted(Label::BC), restricted(Label::CE)};
}

MetricReport compute_report(const RunMatrix& full) {
  auto [m, dropped] = drop_inconclusive(full);
  MetricReport r;
  r.backend_name = full.backend_name;
  r.attempts = m.attempts;
  r.instances = static_cast<int>(m.rows());
  r.dropped_inconclusive = dropped;
  require_rows(m);
  r.per_attempt = per_attempt_accuracy(m);
  r.mean_accuracy = mean_accuracy(m);
  r.accuracy_spread = accuracy_spread(m);
  for (int k = 1; k <= m.attempts; ++k) {
    r.acc_at[k] = acc_at(m, k);
    r.tar_at[k] = tar_at(m, k);
    r.cons_at[k] = cons_at(m, k);
    r.tar_at_correctness[k] = tar_at(m, k, AgreementBasis::Correctness);
    r.cons_at_correctness[k] = cons_at(m, k, AgreementBasis::Correctness);
    const CategoryRates split = category_split(m, k);
    if (split.bc) r.bc_at[k] = *split.bc;
    if (split.ce) r.ce_at[k] = *split.ce;
  }
  return r;
}

json MetricReport::to_json() const {
  auto curve = [](const std::map<int, double>& c) {
    json j = json::object();
    for (const auto& [k, v] : c) j[std::to_string(k)] = v;
    return j;
  };
  return {{"backend", backend_name},
          {"instances", instances},
          {"attempts", attempts},
          {"dropped_inconclusive", dropped_inconclusive},
          {"mean_accuracy", mean_accuracy},
          {"accuracy_spread", accuracy_spread},
          {"per_attempt_accuracy", per_attempt},
          {"acc_at", curve(acc_at)},
          {"tar_at", curve(tar_at)},
          {"cons_at", curve(cons_at)},
          {"tar_at_correctness", curve(tar_at_correctness)},
          {"cons_at_correctness", curve(cons_at_correctness)},
          {"bc_at", curve(bc_at)},
          {"ce_at", curve(ce_at)}};
}

std::string MetricReport::to_csv() const {
  std::string out = "metric,k,value\n";
  out += "mean_accuracy,," + format(mean_accuracy) + "\n";
  out += "accuracy_spread,," + format(accuracy_spread) + "\n";
  for (std::size_t a = 0; a < per_attempt.size(); ++a) {
    out += "attempt_accuracy," + std::to_string(a + 1) + "," + format(per_attempt[a]) + "\n";
  }
  const std::pair<const char*, const std::map<int, double>*> curves[] = {
      {"acc_at", &acc_at},
      {"tar_at", &tar_at},
      {"cons_at", &cons_at},
      {"tar_at_correctness", &tar_at_correctness},
      {"cons_at_correctness", &cons_at_correctness},
      {"bc_at", &bc_at},
      {"ce_at", &ce_at},
  };
  for (const auto& [name, curve] : curves) {
    for (const auto& [k, v] : *curve) {
      out += std::string(name) + "," + std::to_string(k) + "," + format(v) + "\n";
    }
  }
  return out;
}

std::size_t UnionReport::region(const std::set<std::string>& members) const {
  unsigned mask = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (members.count(models[i])) mask |= 1u << i;
  }
  auto it = regions.find(mask);
  return it == regions.end() ? 0 : it->second;
}

json UnionReport::to_json() const {
  json regs = json::array();
  for (const auto& [mask, count] : regions) {
    json members = json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (mask & (1u << i)) members.push_back(models[i]);
    }
    regs.push_back({{"models", members}, {"count", count}});
  }
  json solved_by = json::object();
  for (std::size_t i = 0; i < models.size(); ++i) solved_by[models[i]] = solved[i];
  return {{"models", models}, {"solved", solved_by}, {"union", union_size}, {"regions", regs}};
}

UnionReport union_coverage(const std::vector<std::pair<std::string, std::set<std::string>>>& runs,
                           const std::vector<std::string>& corpus_ids) {
  if (runs.size() > 31) throw std::invalid_argument("union_coverage supports at most 31 models");
  const std::set<std::string> corpus(corpus_ids.begin(), corpus_ids.end());
  UnionReport r;
  std::map<std::string, unsigned> membership;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    r.models.push_back(runs[i].first);
    r.solved.push_back(runs[i].second.size());
    for (const std::string& id : runs[i].second) {
      if (!corpus.empty() && !corpus.count(id)) {
        throw MetricError(MetricError::Kind::MismatchedCorpus,
                          "instance '" + id + "' solved by " + runs[i].first +
                              " is not in the corpus");
      }
      membership[id] |= 1u << i;
    }
  }
  r.union_size = membership.size();
  for (const auto& [id, mask] : membership) ++r.regions[mask];
  return r;
}

}  // namespace reforacle::analytics
