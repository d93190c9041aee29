#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nvreg {

// splitmix64 step; used to derive independent per-point/per-shot seeds so
// results do not depend on thread count
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// NVREG_THREADS caps this (0 or unset = hardware concurrency)
int thread_count();

// chunked parallel loop over [0, n); f(i) must only touch slot i of its output
void parallel_for(int n, const std::function<void(int)>& f);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
bool starts_with(const std::string& s, const std::string& prefix);

}  // namespace nvreg
