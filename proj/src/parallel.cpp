// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/parallel.hpp"

#include <cstdlib>
#include <string>

#include "lic/error.hpp"

namespace lic {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kShape: return "SHAPE_MISMATCH";
    case ErrorCode::kFormat: return "FORMAT_ERROR";
    case ErrorCode::kTruncated: return "TRUNCATED";
    case ErrorCode::kUnsupported: return "UNSUPPORTED";
    case ErrorCode::kModelMismatch: return "MODEL_MISMATCH";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kAssertion: return "ASSERTION_FAILED";
  }
  return "UNKNOWN";
}

ThreadPool::ThreadPool(int threads) {
  if (threads < 1) threads = 1;
  workers_.reserve(threads - 1);
  for (int i = 1; i < threads; ++i) {
    workers_.emplace_back([this, i] { worker_loop(i); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : workers_) t.join();
}

namespace {

// Contiguous block [lo, hi) owned by participant `index` out of `count`.
void block_range(std::size_t begin, std::size_t end, int index, int count,
                 std::size_t* lo, std::size_t* hi) {
  const std::size_t n = end - begin;
  const std::size_t per = n / count;
  const std::size_t extra = n % count;
  const std::size_t i = static_cast<std::size_t>(index);
  *lo = begin + i * per + (i < extra ? i : extra);
  *hi = *lo + per + (i < extra ? 1 : 0);
}

}  // namespace

void ThreadPool::parallel_for(std::size_t begin, std::size_t end,
                              const std::function<void(std::size_t)>& fn) {
  if (end <= begin) return;
  if (workers_.empty() || end - begin == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    job_ = &fn;
    job_begin_ = begin;
    job_end_ = end;
    pending_ = static_cast<int>(workers_.size());
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();

  std::size_t lo, hi;
  block_range(begin, end, 0, size(), &lo, &hi);
  std::exception_ptr mine;
  try {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  } catch (...) {
    mine = std::current_exception();
  }

  std::unique_lock<std::mutex> lock(mu_);
  done_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
  if (mine) std::rethrow_exception(mine);
  if (error_) std::rethrow_exception(error_);
}

void ThreadPool::worker_loop(int index) {
  unsigned long seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* job;
    std::size_t begin, end;
    {
      std::unique_lock<std::mutex> lock(mu_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      begin = job_begin_;
      end = job_end_;
    }
    std::size_t lo, hi;
    block_range(begin, end, index, size(), &lo, &hi);
    std::exception_ptr err;
    try {
      for (std::size_t i = lo; i < hi; ++i) (*job)(i);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_.notify_one();
    }
  }
}

int default_thread_count() {
  if (const char* env = std::getenv("LIC_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace lic
