#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reforacle/assessor.hpp"
#include "reforacle/dataset.hpp"

namespace reforacle::analytics {

class MetricError : public std::runtime_error {
 public:
  enum class Kind { EmptyMatrix, KOutOfRange, NotRectangular, MismatchedCorpus };
  MetricError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Cell {
  AnswerLabel answer = AnswerLabel::ParseError;
  bool correct = false;
  bool inconclusive = false;

  bool operator==(const Cell&) const = default;
};

/// Instances x attempts grid for one model configuration.
struct RunMatrix {
  std::string backend_name;
  std::vector<std::string> instance_ids;
  std::vector<Label> labels;
  int attempts = 0;
  std::vector<std::vector<Cell>> cells;  // [instance][attempt]

  std::size_t rows() const { return cells.size(); }
  /// Throws NotRectangular unless ids, labels and rows agree and every row
  /// has `attempts` cells.
  void validate() const;
};

/// What makes two answers "the same" for tar@k and cons@k.
enum class AgreementBasis { AnswerLabel, Correctness };

std::string_view to_string(AgreementBasis basis);

/// Drops every row with an inconclusive cell. Returns the number dropped.
std::pair<RunMatrix, int> drop_inconclusive(const RunMatrix& m);

/// Builds a matrix from outcome records of one backend (and variant tag).
/// Rows follow first appearance; K is the largest attempt index. Missing
/// cells are marked inconclusive.
RunMatrix build_matrix(const std::vector<AssessmentOutcome>& outcomes,
                       const std::string& backend_name, const std::string& variant_tag = "");

std::vector<double> per_attempt_accuracy(const RunMatrix& m);
double mean_accuracy(const RunMatrix& m);
double accuracy_spread(const RunMatrix& m);
double acc_at(const RunMatrix& m, int k);
double tar_at(const RunMatrix& m, int k, AgreementBasis basis = AgreementBasis::AnswerLabel);
double cons_at(const RunMatrix& m, int k, AgreementBasis basis = AgreementBasis::AnswerLabel);

struct CategoryRates {
  std::optional<double> bc;  // absent when the matrix has no BC rows
  std::optional<double> ce;
};

/// acc_at restricted to BC rows and CE rows.
CategoryRates category_split(const RunMatrix& m, int k);

struct MetricReport {
  std::string backend_name;
  int instances = 0;
  int attempts = 0;
  int dropped_inconclusive = 0;
  double mean_accuracy = 0.0;
  double accuracy_spread = 0.0;
  std::vector<double> per_attempt;
  std::map<int, double> acc_at;
  std::map<int, double> tar_at;
  std::map<int, double> cons_at;
  std::map<int, double> tar_at_correctness;
  std::map<int, double> cons_at_correctness;
  std::map<int, double> bc_at;
  std::map<int, double> ce_at;

  nlohmann::json to_json() const;
  /// Columns: metric,k,value (k empty for scalars).
  std::string to_csv() const;
};

/// Computes every metric after dropping inconclusive rows.
MetricReport compute_report(const RunMatrix& m);

struct UnionReport {
  std::vector<std::string> models;
  std::vector<std::size_t> solved;
  std::size_t union_size = 0;
  /// Bit i set = solved by models[i]. Only non-empty regions are listed.
  std::map<unsigned, std::size_t> regions;

  /// Count of the region solved by exactly `members`.
  std::size_t region(const std::set<std::string>& members) const;
  nlohmann::json to_json() const;
};

/// OR-union of per-model solved sets. Throws MismatchedCorpus when a solved
/// id is not in `corpus_ids` (skipped when `corpus_ids` is empty).
UnionReport union_coverage(const std::vector<std::pair<std::string, std::set<std::string>>>& runs,
                           const std::vector<std::string>& corpus_ids = {});

}  // namespace reforacle::analytics
