#include "flowrl/partition.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

void validate(const IlpInstance& inst) {
  if (inst.capacity < 0) {
    throw Error(ErrorCode::kCapacityNegative,
                "capacity " + std::to_string(inst.capacity));
  }
  for (std::size_t i = 0; i < inst.rules.size(); ++i) {
    if (inst.rules[i].t < 0 || inst.rules[i].s <= 0) {
      throw Error(ErrorCode::kValidationError,
                  "rule " + std::to_string(i) + " needs t >= 0 and s > 0",
                  "baselines");
    }
  }
}

std::int64_t total_t(const IlpInstance& inst) {
  std::int64_t sum = 0;
  for (const auto& r : inst.rules) sum += r.t;
  return sum;
}

}  // namespace

Assignment knapsack_exact(const IlpInstance& inst) {
  validate(inst);
  const std::size_t n = inst.rules.size();
  std::int64_t g = 0;
  for (const auto& r : inst.rules) g = std::gcd(g, r.s);
  if (g == 0) g = 1;
  const auto units = static_cast<std::size_t>(inst.capacity / g);

  // best[i][c]: max on-switch t using rules i..n-1 within c units. Filling
  // from the back lets the forward reconstruction prefer low indices.
  const std::size_t width = units + 1;
  std::vector<std::int64_t> best((n + 1) * width, 0);
  for (std::size_t i = n; i-- > 0;) {
    const auto w = static_cast<std::size_t>(inst.rules[i].s / g);
    const std::int64_t t = inst.rules[i].t;
    for (std::size_t c = 0; c <= units; ++c) {
      std::int64_t skip = best[(i + 1) * width + c];
      std::int64_t take = -1;
      if (w <= c) take = t + best[(i + 1) * width + c - w];
      best[i * width + c] = take > skip ? take : skip;
    }
  }

  Assignment a;
  std::size_t c = units;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = static_cast<std::size_t>(inst.rules[i].s / g);
    if (w <= c &&
        inst.rules[i].t + best[(i + 1) * width + c - w] == best[i * width + c]) {
      a.on_switch.push_back(i);
      c -= w;
    }
  }
  a.objective = total_t(inst) - best[units];
  return a;
}

Assignment brute_force_partition(const IlpInstance& inst) {
  validate(inst);
  const std::size_t n = inst.rules.size();
  if (n > 20) {
    throw Error(ErrorCode::kTooLarge, std::to_string(n) + " rules (max 20)");
  }
  const std::int64_t all_t = total_t(inst);
  std::int64_t best_obj = -1;
  std::uint32_t best_mask = 0;
  // Bit (n-1-i) stands for rule i, so numerically larger masks are
  // lexicographically greater inclusion vectors.
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::int64_t size = 0, on_t = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << (n - 1 - i))) {
        size += inst.rules[i].s;
        on_t += inst.rules[i].t;
      }
    }
    if (size > inst.capacity) continue;
    std::int64_t obj = all_t - on_t;
    if (best_obj < 0 || obj < best_obj || (obj == best_obj && mask > best_mask)) {
      best_obj = obj;
      best_mask = mask;
    }
  }
  Assignment a;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask & (1u << (n - 1 - i))) a.on_switch.push_back(i);
  }
  a.objective = best_obj < 0 ? all_t : best_obj;
  return a;
}

bool is_valid_assignment(const IlpInstance& inst, const Assignment& a) {
  std::vector<bool> used(inst.rules.size(), false);
  std::int64_t size = 0, on_t = 0;
  for (std::size_t i : a.on_switch) {
    if (i >= inst.rules.size() || used[i]) return false;
    used[i] = true;
    size += inst.rules[i].s;
    on_t += inst.rules[i].t;
  }
  return size <= inst.capacity && a.objective == total_t(inst) - on_t;
}

void write_ilp(std::ostream& out, const IlpInstance& inst) {
  out << "capacity=" << inst.capacity << '\n';
  for (const auto& r : inst.rules) out << r.t << ',' << r.s << '\n';
}

IlpInstance read_ilp(std::istream& in) {
  auto fail = [](int line_no, const std::string& why) {
    throw Error(ErrorCode::kParseError,
                "instance line " + std::to_string(line_no) + ": " + why,
                "baselines");
  };
  IlpInstance inst;
  bool have_capacity = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!have_capacity) {
      auto kv = split(body, '=');
      if (kv.size() != 2 || trim(kv[0]) != "capacity" ||
          !parse_int(kv[1], &inst.capacity)) {
        fail(line_no, "expected capacity=<bits>");
      }
      have_capacity = true;
      continue;
    }
    auto parts = split(body, ',');
    IlpRule r;
    if (parts.size() != 2 || !parse_int(parts[0], &r.t) ||
        !parse_int(parts[1], &r.s)) {
      fail(line_no, "expected t,s");
    }
    inst.rules.push_back(r);
  }
  if (!have_capacity) fail(line_no, "missing capacity header");
  return inst;
}

}  // namespace flowrl
