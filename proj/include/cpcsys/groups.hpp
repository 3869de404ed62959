#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Discrete amenable groups and Folner data: countable groups presented either
// as an integer lattice Z^d or as a finite group with an explicit
// multiplication table, together with finite subsets used as approximate
// invariance windows.

namespace cpcsys {

// A group element. Lattice elements are coordinate vectors of length d;
// finite-group elements are a single index into the multiplication table.
using GroupElement = std::vector<std::int64_t>;

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : g) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Immutable group description. FiniteGroup tables are validated on
// construction: identity at index 0, rows/columns permutations, full
// associativity. Copies are cheap enough to pass by value where convenient.
class Group {
 public:
  // Z^d with componentwise addition; dim >= 1.
  static Group integer_lattice(int dim);

  // Finite group from a multiplication table: table[a][b] = a*b, identity at
  // index 0. Inverses are derived from the table.
  static Group finite(std::vector<std::vector<int>> table);

  bool is_lattice() const { return lattice_dim_ > 0; }
  int lattice_dim() const { return lattice_dim_; }

  // Order of a finite group; throws std::logic_error for lattices.
  int order() const;

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  // True iff g is a well-formed element (arity and, for finite groups, index
  // range).
  bool contains(const GroupElement& g) const;

  // Throws std::domain_error unless contains(g).
  void require_element(const GroupElement& g, const char* where) const;

  std::string to_string(const GroupElement& g) const;

  bool operator==(const Group& other) const;

 private:
  Group() = default;
  int lattice_dim_ = 0;  // 0 marks a finite group
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
};

// An ordered finite subset of a group with O(1) membership and index lookup.
// Elements are distinct; order is the enumeration order used for matrix
// indices downstream.
class FolnerSet {
 public:
  FolnerSet(const Group& group, std::vector<GroupElement> elements);

  std::size_t size() const { return elements_.size(); }
  const GroupElement& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<GroupElement>& elements() const { return elements_; }

  std::optional<std::size_t> index_of(const GroupElement& g) const;
  bool contains(const GroupElement& g) const { return index_.count(g) > 0; }

 private:
  std::vector<GroupElement> elements_;
  std::unordered_map<GroupElement, std::size_t, GroupElementHash> index_;
};

// A sequence of Folner sets in a fixed group.
struct FolnerSequence {
  Group group;
  std::vector<FolnerSet> sets;

  std::size_t size() const { return sets.size(); }
};

// Indices into a FolnerSequence together with the epsilon column they were
// certified against: for all j < k,
//   summability_lhs(F_{idx[j]}, F_{idx[k]}) < eps[k].
struct SummabilityCertificate {
  std::vector<std::size_t> indices;
  std::vector<double> eps;
};

// Thrown when greedy extraction cannot certify the requested epsilon column
// within the search horizon; carries the indices certified so far.
class SummabilityHorizonError : public std::runtime_error {
 public:
  SummabilityHorizonError(std::string message, SummabilityCertificate partial)
      : std::runtime_error(std::move(message)), partial_(std::move(partial)) {}
  const SummabilityCertificate& partial() const { return partial_; }

 private:
  SummabilityCertificate partial_;
};

// The box [-n, n]^d enumerated lexicographically; cardinality (2n+1)^d.
FolnerSet box_folner(int dim, std::int64_t n);

// Box sequence [-0,0]^d, [-1,1]^d, ..., [-max_n, max_n]^d; stage index equals
// the box radius.
FolnerSequence box_sequence(int dim, std::int64_t max_n);

// Normalized symmetric-difference defect |F \Delta sF| / |F| in [0, 2].
double folner_defect(const Group& group, const FolnerSet& f, const GroupElement& s);

// max_{g,h in F_n} (1 - |F_m \cap g h^{-1} F_m| / |F_m|) * |F_n|, the quantity
// that a summable subsequence must keep below eps_m.
double summability_lhs(const Group& group, const FolnerSet& f_n, const FolnerSet& f_m);

// Greedy extraction of a summable subsequence: having chosen i_0 < ... <
// i_{k-1}, pick the least i_k with summability_lhs(F_{i_j}, F_{i_k}) < eps[k]
// for all j < k. Each pick examines at most `horizon` candidates; exhausting
// the horizon or the sequence throws SummabilityHorizonError with the partial
// certificate. eps must be positive and non-increasing.
SummabilityCertificate extract_summable(const FolnerSequence& seq,
                                        const std::vector<double>& eps,
                                        std::size_t horizon = 512);

// Re-checks every pair of a certificate against its eps column.
bool verify_certificate(const FolnerSequence& seq, const SummabilityCertificate& cert);

}  // namespace cpcsys
