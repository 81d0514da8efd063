// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mrflow/exact_sum.hpp"

namespace mrflow {

enum class ReduceOp { sum, min, max };

using Bytes = std::vector<std::byte>;

/// Per-task count of cross-task reduction rounds.
struct ReductionLedger {
  std::uint64_t global_rounds = 0;
  bool local_phase_open = false;
};

/// Per-task point-to-point traffic and reduction rounds.
struct TransportCounters {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t reduction_rounds = 0;

  std::uint64_t total_events() const noexcept {
    return messages_sent + messages_received + reduction_rounds;
  }
};

/// Message passing and reductions for one task of a task group.
///
/// Reductions are collective: every task of the group must issue them in
/// the same order with the same shapes. Sums travel as ExactSum so their
/// result is independent of the number of tasks.
class Collective {
 public:
  virtual ~Collective() = default;

  virtual int rank() const noexcept = 0;
  virtual int size() const noexcept = 0;

  /// One reduction round carrying any number of sums, minima and maxima.
  void allreduce(std::span<ExactSum> sums, std::span<double> mins = {},
                 std::span<double> maxs = {});

  double allreduce_sum(double local);
  double allreduce_min(double local);
  double allreduce_max(double local);

  void send(int dest, int tag, Bytes payload);
  Bytes recv(int src, int tag);
  std::optional<Bytes> try_recv(int src, int tag);

  /// Local-reduction protocol: tasks accumulate partials between
  /// begin_local_phase() and end_local_phase(), and finalize_local()
  /// combines them across tasks. Finalizing outside a phase is a
  /// ProtocolError.
  void begin_local_phase();
  double finalize_local(ReduceOp op, double partial);
  void end_local_phase();

  const ReductionLedger& ledger() const noexcept { return ledger_; }
  const TransportCounters& counters() const noexcept { return counters_; }

 protected:
  virtual void do_allreduce(std::span<ExactSum> sums, std::span<double> mins,
                            std::span<double> maxs) = 0;
  virtual void do_send(int dest, int tag, Bytes payload) = 0;
  virtual std::optional<Bytes> do_recv(int src, int tag, bool blocking) = 0;

 private:
  ReductionLedger ledger_;
  TransportCounters counters_;
};

/// A group of one task; reductions are identities, messages go to self.
class SingleTask final : public Collective {
 public:
  SingleTask();
  ~SingleTask() override;
  int rank() const noexcept override { return 0; }
  int size() const noexcept override { return 1; }

 protected:
  void do_allreduce(std::span<ExactSum>, std::span<double>, std::span<double>) override {}
  void do_send(int dest, int tag, Bytes payload) override;
  std::optional<Bytes> do_recv(int src, int tag, bool blocking) override;

 private:
  struct Mailbox;
  std::unique_ptr<Mailbox> mail_;
};

/// Tasks realized as threads of one process exchanging data through shared
/// mailboxes. abort() wakes every waiting task with a CommunicationError.
class InProcessGroup {
 public:
  explicit InProcessGroup(int size);
  ~InProcessGroup();
  InProcessGroup(const InProcessGroup&) = delete;
  InProcessGroup& operator=(const InProcessGroup&) = delete;

  int size() const noexcept;
  Collective& endpoint(int rank);
  void abort() noexcept;

 private:
  struct Shared;
  class Endpoint;
  std::shared_ptr<Shared> shared_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
};

/// Runs `body` on `tasks` worker threads sharing one InProcessGroup and
/// joins them. If any task throws, the group is aborted and the first
/// exception that is not a secondary CommunicationError is rethrown.
void run_tasks(int tasks, const std::function<void(Collective&)>& body);

}  // namespace mrflow
