/*
Copyright 2026 The HetSched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace hetsched {

enum class Errc {
    overflow,
    cycle_detected,
    dangling_edge,
    duplicate_node,
    unknown_task_kind,
    path_explosion,
    non_positive_deadline,
    invalid_state,
    no_eligible_pe,
    ineligible_pe,
    non_monotone_trace,
    unknown_app,
    parse_error,
    incomplete_run,
    no_feasible_speed,
    empty_space,
    no_safe_config,
    config_error,
    io_error,
};

inline const char *errc_name(Errc c) {
    switch (c) {
    case Errc::overflow: return "Overflow";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::dangling_edge: return "DanglingEdge";
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::unknown_task_kind: return "UnknownTaskKind";
    case Errc::path_explosion: return "PathExplosion";
    case Errc::non_positive_deadline: return "NonPositiveDeadline";
    case Errc::invalid_state: return "InvalidState";
    case Errc::no_eligible_pe: return "NoEligiblePe";
    case Errc::ineligible_pe: return "IneligiblePe";
    case Errc::non_monotone_trace: return "NonMonotoneTrace";
    case Errc::unknown_app: return "UnknownApp";
    case Errc::parse_error: return "ParseError";
    case Errc::incomplete_run: return "IncompleteRun";
    case Errc::no_feasible_speed: return "NoFeasibleSpeed";
    case Errc::empty_space: return "EmptySpace";
    case Errc::no_safe_config: return "NoSafeConfig";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class so callers
/// and tests can dispatch without parsing the message.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string &what) { throw Error(code, what); }

} // namespace hetsched
