#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reforacle/dataset.hpp"
#include "reforacle/rng.hpp"
#include "reforacle/source_set.hpp"
#include "reforacle/structural_index.hpp"

namespace reforacle::mt {

/// AF: add field, CO: add comment, IC: add inner class, JI: add import,
/// LVD: add local variable, TLC: add top-level class.
enum class OperatorId { AF, CO, IC, JI, LVD, TLC };

inline constexpr OperatorId kAllOperators[] = {OperatorId::AF,  OperatorId::CO,
                                               OperatorId::IC,  OperatorId::JI,
                                               OperatorId::LVD, OperatorId::TLC};

std::string_view to_string(OperatorId op);
std::optional<OperatorId> operator_from_string(std::string_view text);

/// Pool used by JI; every entry lives in java.util.
inline constexpr std::string_view kImportPool[] = {
    "List",   "Map",   "Set",       "ArrayList", "HashMap", "HashSet",
    "LinkedList", "Deque", "ArrayDeque", "Optional", "Objects", "Collections"};

struct InjectedElement {
  std::string kind;  // field, comment, inner_class, import, local_variable, top_level_class
  std::vector<std::string> names;  // declared identifiers, primary first (none for comments)
  std::string file;
  int line = 0;        // 1-based line in the variant where the text starts
  int line_count = 0;  // newlines contained in `text`
  std::size_t offset = 0;  // byte offset in the variant file
  std::string text;        // exact inserted bytes
};

struct MetamorphicVariant {
  std::string base_instance_id;
  OperatorId op = OperatorId::CO;
  std::uint64_t seed = 0;  // operator seed: apply_operator(base, op, seed) reproduces it
  std::optional<std::uint64_t> master_seed;
  SourceSet transformed_original;
  std::vector<InjectedElement> manifest;
  bool resulting_unchanged = true;

  /// `mt:<master seed or seed>:<OP>`.
  std::string variant_tag() const;
};

class MetamorphError : public std::runtime_error {
 public:
  enum class Kind { NoInsertionPoint };
  MetamorphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// `prefix` followed by a random alphanumeric suffix; never a keyword or a
/// name already in `index.identifiers`. The result is added to the index.
std::string fresh_identifier(StructuralIndex& index, std::string_view prefix, CounterRng& rng);

bool operator_applicable(const StructuralIndex& index, OperatorId op);

/// Applies one operator. All choices derive from `seed`.
/// Throws NoInsertionPoint when the operator has no legal site.
MetamorphicVariant apply_operator(const SourceSet& src, OperatorId op, std::uint64_t seed,
                                  std::string base_instance_id = "");

/// Removes every injected span, giving back the base program.
SourceSet restore(const SourceSet& variant, const std::vector<InjectedElement>& manifest);

struct CorpusTransform {
  std::vector<MetamorphicVariant> variants;
  std::map<OperatorId, int> operator_counts;
  std::vector<std::string> unchanged;  // instances no operator applied to
};

/// One variant per instance; the operator is drawn uniformly among the
/// applicable ones from a stream keyed by (master_seed, instance id).
CorpusTransform transform_corpus(const BugCorpus& corpus, std::uint64_t master_seed);

/// Key/value manifest: operator, seed, master_seed, base, one `element=`
/// JSON line per injected element.
std::string manifest_text(const MetamorphicVariant& v);

/// Writes `<root>/variants/<master_seed>/<id>/` in the dataset layout with
/// the transformed original, the unchanged resulting program, the test (BC)
/// and the manifest.
std::filesystem::path write_variant(const MetamorphicVariant& v, const BugInstance& base,
                                    const std::filesystem::path& root);

/// Instance whose original is the variant; id and everything else from `base`.
BugInstance variant_instance(const MetamorphicVariant& v, const BugInstance& base);

}  // namespace reforacle::mt
