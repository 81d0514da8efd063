// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/collective.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>

#include "mrflow/error.hpp"

namespace mrflow {

void Collective::allreduce(std::span<ExactSum> sums, std::span<double> mins,
                           std::span<double> maxs) {
  do_allreduce(sums, mins, maxs);
  ++ledger_.global_rounds;
  ++counters_.reduction_rounds;
}

double Collective::allreduce_sum(double local) {
  ExactSum s;
  s.add(local);
  allreduce(std::span<ExactSum>(&s, 1));
  return s.value();
}

double Collective::allreduce_min(double local) {
  allreduce({}, std::span<double>(&local, 1));
  return local;
}

double Collective::allreduce_max(double local) {
  allreduce({}, {}, std::span<double>(&local, 1));
  return local;
}

void Collective::send(int dest, int tag, Bytes payload) {
  if (dest < 0 || dest >= size()) throw CommunicationError("send to invalid task " + std::to_string(dest));
  ++counters_.messages_sent;
  counters_.bytes_sent += payload.size();
  do_send(dest, tag, std::move(payload));
}

Bytes Collective::recv(int src, int tag) {
  if (src < 0 || src >= size()) throw CommunicationError("recv from invalid task " + std::to_string(src));
  auto msg = do_recv(src, tag, true);
  if (!msg) throw CommunicationError("no message from task " + std::to_string(src));
  ++counters_.messages_received;
  return std::move(*msg);
}

std::optional<Bytes> Collective::try_recv(int src, int tag) {
  if (src < 0 || src >= size()) throw CommunicationError("recv from invalid task " + std::to_string(src));
  auto msg = do_recv(src, tag, false);
  if (msg) ++counters_.messages_received;
  return msg;
}

void Collective::begin_local_phase() {
  if (ledger_.local_phase_open) throw ProtocolError("local reduction phase already open");
  ledger_.local_phase_open = true;
}

double Collective::finalize_local(ReduceOp op, double partial) {
  if (!ledger_.local_phase_open) {
    throw ProtocolError("finalize_local called outside a local reduction phase");
  }
  switch (op) {
    case ReduceOp::sum:
      return allreduce_sum(partial);
    case ReduceOp::min:
      return allreduce_min(partial);
    case ReduceOp::max:
      return allreduce_max(partial);
  }
  throw ProtocolError("unknown reduction");
}

void Collective::end_local_phase() {
  if (!ledger_.local_phase_open) throw ProtocolError("no local reduction phase open");
  ledger_.local_phase_open = false;
}

// ---------------------------------------------------------------------------

struct SingleTask::Mailbox {
  std::map<int, std::deque<Bytes>> by_tag;
};

SingleTask::SingleTask() : mail_(std::make_unique<Mailbox>()) {}
SingleTask::~SingleTask() = default;

void SingleTask::do_send(int /*dest*/, int tag, Bytes payload) {
  mail_->by_tag[tag].push_back(std::move(payload));
}

std::optional<Bytes> SingleTask::do_recv(int /*src*/, int tag, bool blocking) {
  auto it = mail_->by_tag.find(tag);
  if (it == mail_->by_tag.end() || it->second.empty()) {
    if (blocking) throw CommunicationError("receive would block forever on a single task");
    return std::nullopt;
  }
  Bytes out = std::move(it->second.front());
  it->second.pop_front();
  return out;
}

// ---------------------------------------------------------------------------

struct InProcessGroup::Shared {
  struct Contribution {
    std::vector<ExactSum> sums;
    std::vector<double> mins;
    std::vector<double> maxs;
  };

  explicit Shared(int n) : size(n), slots(static_cast<std::size_t>(n)) {}

  const int size;
  std::mutex mutex;
  std::condition_variable cv;
  std::uint64_t generation = 0;
  int arrived = 0;
  std::vector<Contribution> slots;
  Contribution result;
  bool shape_mismatch = false;
  bool aborted = false;
  std::map<std::tuple<int, int, int>, std::deque<Bytes>> mail;  // (src, dst, tag)

  void combine() {
    shape_mismatch = false;
    result = slots[0];
    for (std::size_t r = 1; r < slots.size(); ++r) {
      const auto& c = slots[r];
      if (c.sums.size() != result.sums.size() || c.mins.size() != result.mins.size() ||
          c.maxs.size() != result.maxs.size()) {
        shape_mismatch = true;
        return;
      }
      for (std::size_t i = 0; i < c.sums.size(); ++i) result.sums[i].merge(c.sums[i]);
      for (std::size_t i = 0; i < c.mins.size(); ++i) result.mins[i] = std::min(result.mins[i], c.mins[i]);
      for (std::size_t i = 0; i < c.maxs.size(); ++i) result.maxs[i] = std::max(result.maxs[i], c.maxs[i]);
    }
  }
};

class InProcessGroup::Endpoint final : public Collective {
 public:
  Endpoint(std::shared_ptr<Shared> shared, int rank) : shared_(std::move(shared)), rank_(rank) {}

  int rank() const noexcept override { return rank_; }
  int size() const noexcept override { return shared_->size; }

 protected:
  void do_allreduce(std::span<ExactSum> sums, std::span<double> mins,
                    std::span<double> maxs) override {
    Shared& s = *shared_;
    std::unique_lock lock(s.mutex);
    if (s.aborted) throw CommunicationError("task group aborted");
    auto& slot = s.slots[static_cast<std::size_t>(rank_)];
    slot.sums.assign(sums.begin(), sums.end());
    slot.mins.assign(mins.begin(), mins.end());
    slot.maxs.assign(maxs.begin(), maxs.end());
    const std::uint64_t gen = s.generation;
    if (++s.arrived == s.size) {
      s.combine();
      s.arrived = 0;
      ++s.generation;
      s.cv.notify_all();
    } else {
      s.cv.wait(lock, [&] { return s.generation != gen || s.aborted; });
      if (s.generation == gen) throw CommunicationError("task group aborted during reduction");
    }
    if (s.shape_mismatch) throw ProtocolError("reduction shapes differ across tasks");
    std::copy(s.result.sums.begin(), s.result.sums.end(), sums.begin());
    std::copy(s.result.mins.begin(), s.result.mins.end(), mins.begin());
    std::copy(s.result.maxs.begin(), s.result.maxs.end(), maxs.begin());
  }

  void do_send(int dest, int tag, Bytes payload) override {
    Shared& s = *shared_;
    {
      std::lock_guard lock(s.mutex);
      if (s.aborted) throw CommunicationError("task group aborted");
      s.mail[{rank_, dest, tag}].push_back(std::move(payload));
    }
    s.cv.notify_all();
  }

  std::optional<Bytes> do_recv(int src, int tag, bool blocking) override {
    Shared& s = *shared_;
    std::unique_lock lock(s.mutex);
    auto& queue = s.mail[{src, rank_, tag}];
    if (blocking) {
      s.cv.wait(lock, [&] { return !queue.empty() || s.aborted; });
    }
    if (queue.empty()) {
      if (s.aborted) throw CommunicationError("task group aborted while receiving");
      return std::nullopt;
    }
    Bytes out = std::move(queue.front());
    queue.pop_front();
    return out;
  }

 private:
  std::shared_ptr<Shared> shared_;
  int rank_;
};

InProcessGroup::InProcessGroup(int size) {
  if (size < 1) throw ConfigError("task group needs at least one task");
  shared_ = std::make_shared<Shared>(size);
  endpoints_.reserve(static_cast<std::size_t>(size));
  for (int r = 0; r < size; ++r) endpoints_.push_back(std::make_unique<Endpoint>(shared_, r));
}

InProcessGroup::~InProcessGroup() = default;

int InProcessGroup::size() const noexcept { return shared_->size; }

Collective& InProcessGroup::endpoint(int rank) {
  if (rank < 0 || rank >= size()) throw CommunicationError("no such task " + std::to_string(rank));
  return *endpoints_[static_cast<std::size_t>(rank)];
}

void InProcessGroup::abort() noexcept {
  {
    std::lock_guard lock(shared_->mutex);
    shared_->aborted = true;
  }
  shared_->cv.notify_all();
}

void run_tasks(int tasks, const std::function<void(Collective&)>& body) {
  InProcessGroup group(tasks);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));
  std::vector<char> secondary(static_cast<std::size_t>(tasks), 0);
  auto work = [&](int r) {
    try {
      body(group.endpoint(r));
    } catch (const CommunicationError&) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
      secondary[static_cast<std::size_t>(r)] = 1;
      group.abort();
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
      group.abort();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(tasks));
  for (int r = 1; r < tasks; ++r) threads.emplace_back(work, r);
  work(0);
  for (auto& t : threads) t.join();
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r] && !secondary[r]) std::rethrow_exception(errors[r]);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mrflow
