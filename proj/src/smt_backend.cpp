#include "qcheck/smt_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace qcheck {

std::string serialize(const SmtScript& script) {
    std::string out = "(set-logic " + script.logic + ")\n";
    std::vector<std::string> decls = script.declarations;
    std::sort(decls.begin(), decls.end());
    decls.erase(std::unique(decls.begin(), decls.end()), decls.end());
    for (const auto& d : decls) out += "(declare-const " + d + " Real)\n";
    for (const auto& a : script.assertions) out += "(assert " + a.to_string() + ")\n";
    if (script.check) out += "(check-sat)\n";
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

}  // namespace

SmtScript parse_script(std::string_view text) {
    SmtScript out;
    out.check = false;
    bool logic = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(text.substr(pos, nl - pos));
        const std::size_t line_at = pos;
        pos = nl + 1;
        if (line.empty()) continue;
        auto body = [&](std::string_view head) {
            if (!starts_with(line, head) || line.back() != ')')
                throw SmtError("malformed script line '" + std::string(line) + "'", line_at);
            return trim(line.substr(head.size(), line.size() - head.size() - 1));
        };
        if (starts_with(line, "(set-logic ")) {
            out.logic = std::string(body("(set-logic "));
            logic = true;
        } else if (starts_with(line, "(declare-const ")) {
            std::string_view d = body("(declare-const ");
            auto sp = d.find(' ');
            if (sp == std::string_view::npos || trim(d.substr(sp)) != "Real")
                throw SmtError("only Real constants are supported", line_at);
            out.declarations.emplace_back(d.substr(0, sp));
        } else if (starts_with(line, "(assert ")) {
            out.assertions.push_back(parse_smt_term(body("(assert ")));
        } else if (line == "(check-sat)") {
            out.check = true;
        } else {
            throw SmtError("unsupported script line '" + std::string(line) + "'", line_at);
        }
    }
    if (!logic) throw SmtError("script without set-logic", 0);
    return out;
}

std::string to_string(SatResult r) {
    switch (r) {
    case SatResult::Sat:
        return "sat";
    case SatResult::Unsat:
        return "unsat";
    case SatResult::Unknown:
        return "unknown";
    }
    return "";
}

std::string default_solver_command() {
    const char* env = std::getenv("QCHECK_SOLVER");
    if (env != nullptr && *env != '\0') return env;
    return "z3 -in";
}

SolverHandle::SolverHandle(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    std::signal(SIGPIPE, SIG_IGN);
}

SolverHandle::~SolverHandle() { stop(); }

void SolverHandle::start() {
    int in[2];
    int out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw SolverError(std::string("pipe: ") + std::strerror(errno));
    pid_t pid = fork();
    if (pid < 0) throw SolverError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        dup2(in[0], STDIN_FILENO);
        dup2(out[1], STDOUT_FILENO);
        dup2(out[1], STDERR_FILENO);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        const std::string cmd = "exec " + command_;
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    fcntl(in[1], F_SETFD, FD_CLOEXEC);
    fcntl(out[0], F_SETFD, FD_CLOEXEC);
    pid_ = pid;
    to_solver_ = in[1];
    from_solver_ = out[0];
    pending_.clear();
}

void SolverHandle::stop() {
    if (pid_ < 0) return;
    close(to_solver_);
    close(from_solver_);
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
    to_solver_ = from_solver_ = -1;
    pending_.clear();
}

std::string SolverHandle::read_line(std::chrono::steady_clock::time_point deadline) {
    for (;;) {
        auto nl = pending_.find('\n');
        if (nl != std::string::npos) {
            std::string line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            return line;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            stop();
            throw SolverError("solver timeout after " + std::to_string(timeout_.count()) + " ms");
        }
        pollfd pfd{from_solver_, POLLIN, 0};
        int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
        if (r < 0) {
            if (errno == EINTR) continue;
            throw SolverError(std::string("poll: ") + std::strerror(errno));
        }
        if (r == 0) continue;
        char buf[4096];
        ssize_t n = read(from_solver_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SolverError(std::string("read: ") + std::strerror(errno));
        }
        if (n == 0) {
            std::string rest = pending_;
            stop();
            throw SolverError("solver process '" + command_ + "' exited" +
                              (rest.empty() ? std::string() : ": " + std::string(trim(rest))));
        }
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

SatResult SolverHandle::check_sat(const SmtScript& script) { return check_sat(serialize(script)); }

SatResult SolverHandle::check_sat(const std::string& serialized) {
    if (serialized.find("(check-sat)") == std::string::npos) throw SolverError("script without check-sat");
    if (pid_ < 0) start();
    ++queries_;
    const std::string text = "(reset)\n" + serialized;
    std::size_t off = 0;
    while (off < text.size()) {
        ssize_t n = write(to_solver_, text.data() + off, text.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            std::string err = std::strerror(errno);
            std::string rest;
            try {  // surface what the process printed before dying
                rest = read_line(std::chrono::steady_clock::now() + std::chrono::milliseconds(200));
            } catch (const SolverError& e) {
                rest = e.what();
            }
            stop();
            throw SolverError("cannot write to solver '" + command_ + "': " + err + " " + rest);
        }
        off += static_cast<std::size_t>(n);
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::string errors;
    for (;;) {
        std::string line(trim(read_line(deadline)));
        if (line.empty()) continue;
        if (line == "sat" || line == "unsat" || line == "unknown") {
            if (!errors.empty()) {
                stop();
                throw SolverError("solver reported: " + errors);
            }
            if (line == "sat") return SatResult::Sat;
            if (line == "unsat") return SatResult::Unsat;
            return SatResult::Unknown;
        }
        if (!errors.empty()) errors += "; ";
        errors += line;
        if (!starts_with(line, "(error")) {
            stop();
            throw SolverError("malformed solver output: " + errors);
        }
    }
}

}  // namespace qcheck
