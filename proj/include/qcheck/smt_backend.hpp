#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "qcheck/smt_term.hpp"

namespace qcheck {

struct SmtScript {
    std::string logic = "NRA";
    std::vector<std::string> declarations;  // real-sorted constants
    std::vector<SmtTerm> assertions;
    bool check = true;

    friend bool operator==(const SmtScript&, const SmtScript&) = default;
};

// set-logic, sorted declare-const lines, assert lines, check-sat.
std::string serialize(const SmtScript& script);
// Inverse of serialize for the subset it emits.
SmtScript parse_script(std::string_view text);

enum class SatResult { Sat, Unsat, Unknown };

std::string to_string(SatResult r);

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// QCHECK_SOLVER if set and non-empty, otherwise "z3 -in".
std::string default_solver_command();

// A solver child process spoken to over its standard input and output.
// The process starts lazily and is restarted after a crash or a timeout.
class SolverHandle {
public:
    explicit SolverHandle(std::string command = default_solver_command(),
                          std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~SolverHandle();
    SolverHandle(const SolverHandle&) = delete;
    SolverHandle& operator=(const SolverHandle&) = delete;

    SatResult check_sat(const SmtScript& script);
    SatResult check_sat(const std::string& serialized);

    [[nodiscard]] std::size_t queries() const { return queries_; }
    [[nodiscard]] const std::string& command() const { return command_; }

private:
    void start();
    void stop();
    std::string read_line(std::chrono::steady_clock::time_point deadline);

    std::string command_;
    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int to_solver_ = -1;
    int from_solver_ = -1;
    std::string pending_;
    std::size_t queries_ = 0;
};

}  // namespace qcheck
