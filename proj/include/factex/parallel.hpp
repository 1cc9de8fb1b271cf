// Copyright 2026 The Factex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FACTEX_PARALLEL_HPP_
#define FACTEX_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace factex {

// Caps the OpenMP worker count for the whole process (the CLI --jobs flag).
// jobs <= 0 leaves the runtime default in place.
void set_max_jobs(int jobs);
int max_jobs();

// Deterministic parallel map: body(i) runs for each i in [0, n), each i
// writing only its own output slot. Reductions over the outputs are done
// serially by the caller in index order, so results do not depend on the
// thread count. Exceptions are captured and rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, const Body& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Serial twin of parallel_for, kept as the reference path for tests and the
// benchmark target.
template <typename Body>
void serial_for(std::size_t n, const Body& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace factex

#endif  // FACTEX_PARALLEL_HPP_
