#include "reforacle/metamorph.hpp"

#include <algorithm>

#include "json.hpp"
#include "reforacle/java_lexer.hpp"

namespace fs = std::filesystem;

namespace reforacle::mt {

namespace {

constexpr std::string_view kFieldPrefixes[] = {"aux", "extra", "spare", "unused"};
constexpr std::string_view kLocalPrefixes[] = {"tmp", "local", "scratch", "dummy"};
constexpr std::string_view kInnerPrefixes[] = {"Inner", "Nested", "Holder"};
constexpr std::string_view kTopPrefixes[] = {"Aux", "Extra", "Helper", "Support"};
constexpr std::string_view kComments[] = {
    "// note", "// helper section", "// reviewed", "// keep in sync",
    "// placeholder", "// checked",
};
constexpr std::string_view kTypes[] = {"int",    "long",    "double",  "float",
                                       "boolean", "char",   "String",  "Integer",
                                       "Long",   "Double",  "Boolean", "Character"};

template <typename T, std::size_t N>
const T& pick(const T (&pool)[N], CounterRng& rng) {
  return pool[rng.uniform(N)];
}

template <typename T>
const T& pick(const std::vector<T>& pool, CounterRng& rng) {
  return pool[rng.uniform(pool.size())];
}

// A literal whose type is exactly `type`, so no conversion is involved.
std::string literal_for(std::string_view type, CounterRng& rng) {
  const auto small = [&] { return std::to_string(rng.uniform(1000)); };
  if (type == "int" || type == "Integer") return small();
  if (type == "long" || type == "Long") return small() + "L";
  if (type == "double" || type == "Double") return small() + "." + std::to_string(rng.uniform(10));
  if (type == "float") return small() + "." + std::to_string(rng.uniform(10)) + "f";
  if (type == "boolean" || type == "Boolean") return rng.uniform(2) ? "true" : "false";
  if (type == "char" || type == "Character") {
    return std::string("'") + static_cast<char>('a' + rng.uniform(26)) + "'";
  }
  std::string s = "\"";
  const std::size_t n = 1 + rng.uniform(8);
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char>('a' + rng.uniform(26));
  return s + "\"";
}

std::string declaration(StructuralIndex& idx, std::string_view prefix, CounterRng& rng,
                        std::string* name_out) {
  const std::string_view type = pick(kTypes, rng);
  const std::string name = fresh_identifier(idx, prefix, rng);
  if (name_out != nullptr) *name_out = name;
  return std::string(type) + " " + name + " = " + literal_for(type, rng) + ";";
}

int line_of(std::string_view text, std::size_t offset) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

struct Site {
  std::size_t file;
  InsertionPoint point;
};

std::vector<Site> member_sites(const StructuralIndex& idx) {
  std::vector<Site> out;
  for (std::size_t f = 0; f < idx.files.size(); ++f) {
    for (const InsertionPoint& p : idx.files[f].member_points) out.push_back({f, p});
  }
  return out;
}

std::vector<Site> body_sites(const StructuralIndex& idx) {
  std::vector<Site> out;
  for (std::size_t f = 0; f < idx.files.size(); ++f) {
    for (const InsertionPoint& p : idx.files[f].body_points) out.push_back({f, p});
  }
  return out;
}

std::vector<std::string_view> import_candidates(const StructuralIndex& idx) {
  std::vector<std::string_view> out;
  for (std::string_view name : kImportPool) {
    if (!idx.identifiers.count(std::string(name))) out.push_back(name);
  }
  return out;
}

// Renders `lines` (no trailing newlines) for a point: whole indented lines at
// a line start, otherwise a single line placed after a space.
std::string render_at(const InsertionPoint& p, const std::vector<std::string>& lines) {
  std::string out;
  if (p.line_start) {
    for (const std::string& l : lines) out += p.indent + l + "\n";
    return out;
  }
  for (const std::string& l : lines) out += " " + l;
  return out;
}

std::string_view member_modifier(const InsertionPoint& p, CounterRng& rng) {
  // Interface members are implicitly public; only classes get modifiers.
  if (p.owner_kind != TypeKind::Class) return "";
  static constexpr std::string_view kMods[] = {"", "private ", "final "};
  return pick(kMods, rng);
}

}  // namespace

std::string_view to_string(OperatorId op) {
  switch (op) {
    case OperatorId::AF: return "AF";
    case OperatorId::CO: return "CO";
    case OperatorId::IC: return "IC";
    case OperatorId::JI: return "JI";
    case OperatorId::LVD: return "LVD";
    case OperatorId::TLC: return "TLC";
  }
  return "?";
}

std::optional<OperatorId> operator_from_string(std::string_view text) {
  for (OperatorId op : kAllOperators) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

std::string MetamorphicVariant::variant_tag() const {
  return "mt:" + std::to_string(master_seed.value_or(seed)) + ":" + std::string(to_string(op));
}

std::string fresh_identifier(StructuralIndex& index, std::string_view prefix, CounterRng& rng) {
  static constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::size_t length = 4;
  for (int tries = 0;; ++tries) {
    if (tries > 0 && tries % 64 == 0) ++length;
    std::string name(prefix);
    for (std::size_t i = 0; i < length; ++i) name += kAlphabet[rng.uniform(kAlphabet.size())];
    if (java::is_keyword(name) || index.identifiers.count(name)) continue;
    index.identifiers.insert(name);
    return name;
  }
}

bool operator_applicable(const StructuralIndex& idx, OperatorId op) {
  switch (op) {
    case OperatorId::AF:
    case OperatorId::IC: return !member_sites(idx).empty();
    case OperatorId::LVD: return !body_sites(idx).empty();
    case OperatorId::JI: return !idx.files.empty() && !import_candidates(idx).empty();
    case OperatorId::CO:
    case OperatorId::TLC: return !idx.files.empty();
  }
  return false;
}

MetamorphicVariant apply_operator(const SourceSet& src, OperatorId op, std::uint64_t seed,
                                  std::string base_instance_id) {
  StructuralIndex idx = index_structure(src);
  if (!operator_applicable(idx, op)) {
    throw MetamorphError(MetamorphError::Kind::NoInsertionPoint,
                         "operator " + std::string(to_string(op)) + " has no insertion point");
  }
  CounterRng rng = CounterRng::derive(seed, to_string(op));

  InjectedElement el;
  std::size_t file = 0;
  switch (op) {
    case OperatorId::AF: {
      const Site site = pick(member_sites(idx), rng);
      file = site.file;
      std::string name;
      const std::string_view mod = member_modifier(site.point, rng);
      const std::string decl = declaration(idx, pick(kFieldPrefixes, rng), rng, &name);
      el.kind = "field";
      el.names = {name};
      el.offset = site.point.offset;
      el.text = render_at(site.point, {std::string(mod) + decl});
      break;
    }
    case OperatorId::IC: {
      const Site site = pick(member_sites(idx), rng);
      file = site.file;
      const std::string_view mod = member_modifier(site.point, rng);
      const std::string cls = fresh_identifier(idx, pick(kInnerPrefixes, rng), rng);
      std::string field;
      const std::string decl = declaration(idx, pick(kFieldPrefixes, rng), rng, &field);
      el.kind = "inner_class";
      el.names = {cls, field};
      el.offset = site.point.offset;
      el.text = site.point.line_start
                    ? render_at(site.point, {std::string(mod) + "class " + cls + " {",
                                             "    " + decl, "}"})
                    : render_at(site.point,
                                {std::string(mod) + "class " + cls + " { " + decl + " }"});
      break;
    }
    case OperatorId::LVD: {
      const Site site = pick(body_sites(idx), rng);
      file = site.file;
      static constexpr std::string_view kMods[] = {"", "final "};
      const std::string_view mod = pick(kMods, rng);
      std::string name;
      const std::string decl = declaration(idx, pick(kLocalPrefixes, rng), rng, &name);
      el.kind = "local_variable";
      el.names = {name};
      el.offset = site.point.offset;
      el.text = render_at(site.point, {std::string(mod) + decl});
      break;
    }
    case OperatorId::JI: {
      const auto names = import_candidates(idx);
      file = rng.uniform(idx.files.size());
      const std::string_view type = pick(names, rng);
      const InsertionPoint& p = idx.files[file].import_point;
      el.kind = "import";
      el.names = {std::string(type)};
      el.offset = p.offset;
      el.text = p.line_start ? "import java.util." + std::string(type) + ";\n"
                             : " import java.util." + std::string(type) + ";";
      break;
    }
    case OperatorId::CO: {
      file = rng.uniform(idx.files.size());
      const auto& bounds = idx.files[file].line_boundaries;
      const std::size_t at = pick(bounds, rng);
      const std::string_view content = src.files[file].content;
      std::size_t ws = at;
      while (ws < content.size() && (content[ws] == ' ' || content[ws] == '\t')) ++ws;
      el.kind = "comment";
      el.offset = at;
      el.text = std::string(content.substr(at, ws - at)) + std::string(pick(kComments, rng)) +
                " " + std::to_string(rng.uniform(1000)) + "\n";
      break;
    }
    case OperatorId::TLC: {
      file = rng.uniform(idx.files.size());
      const std::string& content = src.files[file].content;
      const std::string cls = fresh_identifier(idx, pick(kTopPrefixes, rng), rng);
      std::string field;
      const std::string decl = declaration(idx, pick(kFieldPrefixes, rng), rng, &field);
      el.kind = "top_level_class";
      el.names = {cls, field};
      el.offset = content.size();
      el.text = (content.empty() || content.back() == '\n' ? "" : "\n") + std::string("\nclass ") +
                cls + " {\n    " + decl + "\n}\n";
      break;
    }
  }

  MetamorphicVariant v;
  v.base_instance_id = std::move(base_instance_id);
  v.op = op;
  v.seed = seed;
  v.transformed_original = src;
  std::string& content = v.transformed_original.files[file].content;
  content.insert(el.offset, el.text);
  el.file = src.files[file].path;
  el.line = line_of(content, el.offset);
  el.line_count = static_cast<int>(std::count(el.text.begin(), el.text.end(), '\n'));
  v.manifest.push_back(std::move(el));
  return v;
}

SourceSet restore(const SourceSet& variant, const std::vector<InjectedElement>& manifest) {
  SourceSet out = variant;
  std::vector<const InjectedElement*> order;
  for (const InjectedElement& e : manifest) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const InjectedElement* a, const InjectedElement* b) { return a->offset > b->offset; });
  for (const InjectedElement* e : order) {
    for (SourceFile& f : out.files) {
      if (f.path != e->file) continue;
      if (f.content.compare(e->offset, e->text.size(), e->text) != 0) {
        throw std::runtime_error("manifest does not match variant at " + e->file + ":" +
                                 std::to_string(e->line));
      }
      f.content.erase(e->offset, e->text.size());
    }
  }
  return out;
}

CorpusTransform transform_corpus(const BugCorpus& corpus, std::uint64_t master_seed) {
  CorpusTransform out;
  for (OperatorId op : kAllOperators) out.operator_counts[op] = 0;
  for (const BugInstance& inst : corpus.instances()) {
    CounterRng rng = CounterRng::derive(master_seed, inst.id);
    std::vector<OperatorId> applicable;
    try {
      const StructuralIndex idx = index_structure(inst.original);
      for (OperatorId op : kAllOperators) {
        if (operator_applicable(idx, op)) applicable.push_back(op);
      }
    } catch (const ScanError&) {
      applicable.clear();
    }
    if (applicable.empty()) {
      out.unchanged.push_back(inst.id);
      continue;
    }
    const OperatorId op = pick(applicable, rng);
    MetamorphicVariant v = apply_operator(inst.original, op, rng.next_u64(), inst.id);
    v.master_seed = master_seed;
    ++out.operator_counts[op];
    out.variants.push_back(std::move(v));
  }
  return out;
}

std::string manifest_text(const MetamorphicVariant& v) {
  std::string out = "base=" + v.base_instance_id + "\noperator=" + std::string(to_string(v.op)) +
                    "\nseed=" + std::to_string(v.seed) + "\n";
  if (v.master_seed) out += "master_seed=" + std::to_string(*v.master_seed) + "\n";
  out += "resulting_unchanged=true\n";
  for (const InjectedElement& e : v.manifest) {
    const nlohmann::ordered_json j = {{"kind", e.kind},     {"names", e.names},
                                      {"file", e.file},     {"line", e.line},
                                      {"line_count", e.line_count}, {"offset", e.offset},
                                      {"text", e.text}};
    out += "element=" + j.dump() + "\n";
  }
  return out;
}

BugInstance variant_instance(const MetamorphicVariant& v, const BugInstance& base) {
  BugInstance inst = base;
  inst.original = v.transformed_original;
  inst.diff.reset();
  inst.loc_original = 0;
  for (const SourceFile& f : inst.original.files) inst.loc_original += java::count_loc(f.content);
  return inst;
}

fs::path write_variant(const MetamorphicVariant& v, const BugInstance& base, const fs::path& root) {
  const fs::path dir =
      root / "variants" / std::to_string(v.master_seed.value_or(v.seed)) / base.id;
  fs::remove_all(dir);
  write_file(dir / "meta", "id=" + base.id + "\ntool=" + std::string(to_string(base.tool)) +
                               "\nrefactoring=" + base.refactoring_type +
                               "\nlabel=" + std::string(to_string(base.label)) +
                               "\noperator=" + std::string(to_string(v.op)) + "\n");
  write_source_tree(v.transformed_original, dir / "original");
  write_source_tree(base.resulting, dir / "resulting");
  if (base.exposing_test) write_file(dir / "test" / "Test.java", *base.exposing_test);
  write_file(dir / "manifest", manifest_text(v));
  return dir;
}

}  // namespace reforacle::mt
