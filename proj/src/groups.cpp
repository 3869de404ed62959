#include "cpcsys/groups.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace cpcsys {

Group Group::integer_lattice(int dim) {
  if (dim < 1) throw std::invalid_argument("integer_lattice: dim must be >= 1");
  Group g;
  g.lattice_dim_ = dim;
  return g;
}

Group Group::finite(std::vector<std::vector<int>> table) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw std::invalid_argument("finite group: empty table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("finite group: table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw std::invalid_argument("finite group: entry out of range");
  }
  for (int a = 0; a < n; ++a) {
    if (table[0][a] != a || table[a][0] != a)
      throw std::invalid_argument("finite group: identity is not at index 0");
  }
  // Each row and column must be a permutation (cancellativity).
  for (int a = 0; a < n; ++a) {
    std::vector<bool> seen_row(n, false), seen_col(n, false);
    for (int b = 0; b < n; ++b) {
      if (seen_row[table[a][b]]) throw std::invalid_argument("finite group: row not a permutation");
      seen_row[table[a][b]] = true;
      if (seen_col[table[b][a]]) throw std::invalid_argument("finite group: column not a permutation");
      seen_col[table[b][a]] = true;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw std::invalid_argument("finite group: table is not associative");

  std::vector<int> inv(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (table[a][b] == 0) {
        inv[a] = b;
        break;
      }
    }
    if (inv[a] < 0) throw std::invalid_argument("finite group: missing inverse");
  }
  Group g;
  g.lattice_dim_ = 0;
  g.table_ = std::move(table);
  g.inverse_ = std::move(inv);
  return g;
}

int Group::order() const {
  if (is_lattice()) throw std::logic_error("order: infinite group");
  return static_cast<int>(table_.size());
}

GroupElement Group::identity() const {
  if (is_lattice()) return GroupElement(static_cast<std::size_t>(lattice_dim_), 0);
  return {0};
}

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  require_element(a, "multiply");
  require_element(b, "multiply");
  if (is_lattice()) {
    GroupElement out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
  }
  return {table_[static_cast<std::size_t>(a[0])][static_cast<std::size_t>(b[0])]};
}

GroupElement Group::inverse(const GroupElement& a) const {
  require_element(a, "inverse");
  if (is_lattice()) {
    GroupElement out(a);
    for (auto& v : out) v = -v;
    return out;
  }
  return {inverse_[static_cast<std::size_t>(a[0])]};
}

bool Group::contains(const GroupElement& g) const {
  if (is_lattice()) return static_cast<int>(g.size()) == lattice_dim_;
  return g.size() == 1 && g[0] >= 0 && g[0] < static_cast<std::int64_t>(table_.size());
}

void Group::require_element(const GroupElement& g, const char* where) const {
  if (!contains(g)) {
    std::ostringstream os;
    os << where << ": element " << to_string(g) << " is not in the group";
    throw std::domain_error(os.str());
  }
}

std::string Group::to_string(const GroupElement& g) const {
  std::ostringstream os;
  if (g.size() == 1) {
    os << g[0];
  } else {
    os << "(";
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) os << ",";
      os << g[i];
    }
    os << ")";
  }
  return os.str();
}

bool Group::operator==(const Group& other) const {
  return lattice_dim_ == other.lattice_dim_ && table_ == other.table_;
}

FolnerSet::FolnerSet(const Group& group, std::vector<GroupElement> elements)
    : elements_(std::move(elements)) {
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    group.require_element(elements_[i], "FolnerSet");
    auto [it, inserted] = index_.emplace(elements_[i], i);
    (void)it;
    if (!inserted) throw std::invalid_argument("FolnerSet: duplicate element");
  }
  if (elements_.empty()) throw std::invalid_argument("FolnerSet: empty set");
}

std::optional<std::size_t> FolnerSet::index_of(const GroupElement& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FolnerSet box_folner(int dim, std::int64_t n) {
  if (dim < 1) throw std::invalid_argument("box_folner: dim must be >= 1");
  if (n < 0) throw std::invalid_argument("box_folner: n must be >= 0");
  const std::int64_t side = 2 * n + 1;
  std::int64_t count = 1;
  for (int i = 0; i < dim; ++i) count *= side;
  std::vector<GroupElement> elements;
  elements.reserve(static_cast<std::size_t>(count));
  GroupElement cur(static_cast<std::size_t>(dim), -n);
  for (std::int64_t k = 0; k < count; ++k) {
    elements.push_back(cur);
    for (int axis = dim - 1; axis >= 0; --axis) {
      if (cur[axis] < n) {
        ++cur[axis];
        break;
      }
      cur[axis] = -n;
    }
  }
  return FolnerSet(Group::integer_lattice(dim), std::move(elements));
}

FolnerSequence box_sequence(int dim, std::int64_t max_n) {
  FolnerSequence seq{Group::integer_lattice(dim), {}};
  seq.sets.reserve(static_cast<std::size_t>(max_n + 1));
  for (std::int64_t n = 0; n <= max_n; ++n) seq.sets.push_back(box_folner(dim, n));
  return seq;
}

double folner_defect(const Group& group, const FolnerSet& f, const GroupElement& s) {
  group.require_element(s, "folner_defect");
  std::size_t in_both = 0;
  for (const auto& g : f.elements())
    if (f.contains(group.multiply(s, g))) ++in_both;
  // |F \Delta sF| = 2 (|F| - |F \cap sF|) since |sF| = |F|.
  const double size = static_cast<double>(f.size());
  return 2.0 * (size - static_cast<double>(in_both)) / size;
}

namespace {

// Distinct products g h^{-1} over a Folner set.
std::vector<GroupElement> distinct_quotients(const Group& group, const FolnerSet& f) {
  std::unordered_set<GroupElement, GroupElementHash> seen;
  std::vector<GroupElement> out;
  for (const auto& g : f.elements()) {
    for (const auto& h : f.elements()) {
      GroupElement q = group.multiply(g, group.inverse(h));
      if (seen.insert(q).second) out.push_back(q);
    }
  }
  return out;
}

std::size_t overlap_count(const Group& group, const FolnerSet& f, const GroupElement& s) {
  std::size_t n = 0;
  for (const auto& g : f.elements())
    if (f.contains(group.multiply(s, g))) ++n;
  return n;
}

}  // namespace

double summability_lhs(const Group& group, const FolnerSet& f_n, const FolnerSet& f_m) {
  double worst = 0.0;
  const double m_size = static_cast<double>(f_m.size());
  for (const auto& q : distinct_quotients(group, f_n)) {
    const double olap = static_cast<double>(overlap_count(group, f_m, q));
    worst = std::max(worst, 1.0 - olap / m_size);
  }
  return worst * static_cast<double>(f_n.size());
}

SummabilityCertificate extract_summable(const FolnerSequence& seq,
                                        const std::vector<double>& eps,
                                        std::size_t horizon) {
  if (eps.empty()) throw std::invalid_argument("extract_summable: empty eps");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (eps[k] <= 0.0) throw std::invalid_argument("extract_summable: eps must be positive");
    if (k > 0 && eps[k] > eps[k - 1])
      throw std::invalid_argument("extract_summable: eps must be non-increasing");
  }
  if (horizon == 0) throw std::invalid_argument("extract_summable: horizon must be >= 1");

  SummabilityCertificate cert;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const std::size_t start = cert.indices.empty() ? 0 : cert.indices.back() + 1;
    bool found = false;
    for (std::size_t step = 0; step < horizon; ++step) {
      const std::size_t cand = start + step;
      if (cand >= seq.size()) break;
      bool ok = true;
      for (std::size_t idx : cert.indices) {
        if (summability_lhs(seq.group, seq.sets[idx], seq.sets[cand]) >= eps[k]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        cert.indices.push_back(cand);
        cert.eps.push_back(eps[k]);
        found = true;
        break;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "extract_summable: not certifiable within horizon (column " << k
         << ", eps " << eps[k] << ", " << cert.indices.size() << " indices certified)";
      throw SummabilityHorizonError(os.str(), cert);
    }
  }
  return cert;
}

bool verify_certificate(const FolnerSequence& seq, const SummabilityCertificate& cert) {
  if (cert.indices.size() != cert.eps.size()) return false;
  for (std::size_t k = 0; k < cert.indices.size(); ++k) {
    if (cert.indices[k] >= seq.size()) return false;
    if (k > 0 && cert.indices[k] <= cert.indices[k - 1]) return false;
    for (std::size_t j = 0; j < k; ++j) {
      const double lhs =
          summability_lhs(seq.group, seq.sets[cert.indices[j]], seq.sets[cert.indices[k]]);
      if (!(lhs < cert.eps[k])) return false;
    }
  }
  return true;
}

}  // namespace cpcsys
