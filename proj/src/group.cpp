#include "stlen/group.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stlen {

namespace {

std::string cyclic_name(const std::string& sym, int k, int n) {
  if (k == 0) return "e";
  if (k == 1) return sym;
  (void)n;
  return sym + "^" + std::to_string(k);
}

}  // namespace

FiniteGroup FiniteGroup::cyclic(int n, const std::string& generator_symbol) {
  if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
  FiniteGroup g;
  g.kind_ = Kind::cyclic;
  g.n_ = n;
  g.id_ = 0;
  g.names_.reserve(n);
  for (int k = 0; k < n; ++k) g.names_.push_back(cyclic_name(generator_symbol, k, n));
  return g;
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<int>> product,
                                    std::vector<std::string> names) {
  FiniteGroup g;
  g.kind_ = Kind::table;
  g.n_ = static_cast<int>(product.size());
  if (g.n_ < 1) throw std::invalid_argument("table group must have positive order");
  for (const auto& row : product) {
    if (static_cast<int>(row.size()) != g.n_)
      throw std::invalid_argument("Cayley table is not square");
    for (int v : row)
      if (v < 0 || v >= g.n_) throw std::invalid_argument("Cayley table entry out of range");
  }
  g.mult_ = std::move(product);

  // locate the identity: the unique e with e*x = x*e = x for all x
  int id = -1;
  for (int e = 0; e < g.n_; ++e) {
    bool ok = true;
    for (int x = 0; x < g.n_ && ok; ++x) ok = g.mult_[e][x] == x && g.mult_[x][e] == x;
    if (ok) {
      id = e;
      break;
    }
  }
  if (id < 0) throw std::invalid_argument("Cayley table has no identity element");
  g.id_ = id;

  g.inv_.assign(g.n_, -1);
  for (int x = 0; x < g.n_; ++x) {
    for (int y = 0; y < g.n_; ++y) {
      if (g.mult_[x][y] == id && g.mult_[y][x] == id) {
        g.inv_[x] = y;
        break;
      }
    }
    if (g.inv_[x] < 0)
      throw std::invalid_argument("element " + std::to_string(x) + " has no inverse");
  }

  if (names.empty()) {
    for (int k = 0; k < g.n_; ++k) names.push_back("g" + std::to_string(k));
  }
  if (static_cast<int>(names.size()) != g.n_)
    throw std::invalid_argument("names list length does not match group order");
  g.names_ = std::move(names);

  g.verify_table();
  return g;
}

void FiniteGroup::verify_table() const {
  auto fail = [&](int x, int y, int z) {
    std::ostringstream os;
    os << "associativity fails at triple (" << x << "," << y << "," << z << "): ("
       << names_[x] << "*" << names_[y] << ")*" << names_[z] << " != " << names_[x] << "*("
       << names_[y] << "*" << names_[z] << ")";
    throw std::invalid_argument(os.str());
  };
  if (n_ <= 512) {
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y)
        for (int z = 0; z < n_; ++z)
          if (mult_[mult_[x][y]][z] != mult_[x][mult_[y][z]]) fail(x, y, z);
  } else {
    // sampled check; seed fixed so runs are reproducible
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> pick(0, n_ - 1);
    for (int t = 0; t < 10000; ++t) {
      int x = pick(rng), y = pick(rng), z = pick(rng);
      if (mult_[mult_[x][y]][z] != mult_[x][mult_[y][z]]) fail(x, y, z);
    }
    const_cast<FiniteGroup*>(this)->sampled_ = true;
  }
}

void FiniteGroup::check_element(int x) const {
  if (x < 0 || x >= n_)
    throw std::invalid_argument("element index " + std::to_string(x) + " out of range [0," +
                                std::to_string(n_) + ")");
}

int FiniteGroup::mul(int x, int y) const {
  check_element(x);
  check_element(y);
  if (kind_ == Kind::cyclic) return (x + y) % n_;
  return mult_[x][y];
}

int FiniteGroup::inv(int x) const {
  check_element(x);
  if (kind_ == Kind::cyclic) return (n_ - x) % n_;
  return inv_[x];
}

int FiniteGroup::pow(int x, long long k) const {
  check_element(x);
  if (k < 0) return pow(inv(x), -k);
  if (kind_ == Kind::cyclic)
    return static_cast<int>((static_cast<long long>(x) % n_ * (k % n_)) % n_);
  int acc = id_;
  int base = x;
  while (k > 0) {
    if (k & 1) acc = mul(acc, base);
    base = mul(base, base);
    k >>= 1;
  }
  return acc;
}

const std::string& FiniteGroup::name(int x) const {
  check_element(x);
  return names_[x];
}

bool FiniteGroup::operator==(const FiniteGroup& other) const {
  if (n_ != other.n_) return false;
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y)
      if (mul(x, y) != other.mul(x, y)) return false;
  return true;
}

nlohmann::json FiniteGroup::to_json() const {
  nlohmann::json j;
  if (kind_ == Kind::cyclic) {
    j["kind"] = "cyclic";
    j["n"] = n_;
  } else {
    j["kind"] = "table";
    j["order"] = n_;
    j["product"] = mult_;
    j["names"] = names_;
  }
  return j;
}

FiniteGroup FiniteGroup::from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "cyclic") return cyclic(j.at("n").get<int>());
  if (kind == "table") {
    auto product = j.at("product").get<std::vector<std::vector<int>>>();
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    if (j.contains("order") && j.at("order").get<int>() != static_cast<int>(product.size()))
      throw std::invalid_argument("declared order does not match table size");
    return from_table(std::move(product), std::move(names));
  }
  throw std::invalid_argument("unknown group kind '" + kind + "'");
}

int element_order(const FiniteGroup& g, int x) {
  g.check_element(x);
  int acc = x;
  int k = 1;
  while (!g.is_identity(acc)) {
    acc = g.mul(acc, x);
    ++k;
    if (k > g.order()) throw std::logic_error("element order exceeds group order");
  }
  return k;
}

std::vector<int> subgroup_closure(const FiniteGroup& g, const std::vector<int>& generators) {
  std::set<int> seen{g.identity()};
  for (int x : generators) {
    g.check_element(x);
    seen.insert(x);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<int> cur(seen.begin(), seen.end());
    for (int x : cur)
      for (int y : cur)
        if (seen.insert(g.mul(x, y)).second) grew = true;
  }
  return {seen.begin(), seen.end()};
}

}  // namespace stlen
