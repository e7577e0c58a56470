#ifndef FLOWRL_PARTITION_HPP_
#define FLOWRL_PARTITION_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace flowrl {

struct IlpRule {
  std::int64_t t = 0;  // overhead while controller-resident
  std::int64_t s = 0;  // size in bits
};

struct IlpInstance {
  std::vector<IlpRule> rules;
  std::int64_t capacity = 0;  // bits
};

struct Assignment {
  std::vector<std::size_t> on_switch;  // ascending 0-based indices
  std::int64_t objective = 0;          // sum of t over controller rules

  bool operator==(const Assignment&) const = default;
};

// Among optimal assignments both solvers return the one whose inclusion
// vector (index 0 first) is lexicographically greatest.

// 0/1 knapsack by dynamic programming over capacity / gcd(s).
// Throws CapacityNegative.
Assignment knapsack_exact(const IlpInstance& inst);

// Enumerates all 2^N assignments. Throws TooLarge when N > 20.
Assignment brute_force_partition(const IlpInstance& inst);

// Capacity respected, indices unique and in range, objective consistent.
bool is_valid_assignment(const IlpInstance& inst, const Assignment& a);

// `capacity=<bits>` header, then one `t,s` pair per line.
void write_ilp(std::ostream& out, const IlpInstance& inst);
IlpInstance read_ilp(std::istream& in);

}  // namespace flowrl

#endif  // FLOWRL_PARTITION_HPP_
