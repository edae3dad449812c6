#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace stlen {

/// A finite group, either cyclic (arithmetic mod n) or given by an explicit
/// Cayley table. Elements are referenced by integer index everywhere; the
/// names are display-only.
class FiniteGroup {
 public:
  enum class Kind { cyclic, table };

  /// Trivial group.
  FiniteGroup() : names_{"e"} {}

  static FiniteGroup cyclic(int n, const std::string& generator_symbol = "a");

  /// Builds a table group and verifies it (identity, inverses, associativity).
  /// Full O(n^3) associativity check up to order 512; beyond that a sampled
  /// check (10^4 random triples) is used and sampled_verification() reports it.
  static FiniteGroup from_table(std::vector<std::vector<int>> product,
                                std::vector<std::string> names = {});

  Kind kind() const { return kind_; }
  int order() const { return n_; }
  int identity() const { return id_; }
  bool is_identity(int x) const { return x == id_; }

  int mul(int x, int y) const;
  int inv(int x) const;
  int pow(int x, long long k) const;

  const std::string& name(int x) const;
  bool sampled_verification() const { return sampled_; }

  void check_element(int x) const;

  nlohmann::json to_json() const;
  static FiniteGroup from_json(const nlohmann::json& j);

  bool operator==(const FiniteGroup& other) const;

 private:
  void verify_table() const;

  Kind kind_ = Kind::cyclic;
  int n_ = 1;
  int id_ = 0;
  bool sampled_ = false;
  std::vector<std::vector<int>> mult_;  // table kind only
  std::vector<int> inv_;                // table kind only
  std::vector<std::string> names_;
};

/// Smallest k >= 1 with x^k = id.
int element_order(const FiniteGroup& g, int x);

/// Product-closure fixed point of the given generators; result is sorted and
/// always contains the identity.
std::vector<int> subgroup_closure(const FiniteGroup& g, const std::vector<int>& generators);

}  // namespace stlen
