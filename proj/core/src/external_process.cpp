#include "llmpso/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <algorithm>

#include <json.hpp>

#include "llmpso/errors.hpp"

namespace llmpso {

using nlohmann::json;
using nlohmann::ordered_json;

std::string encode_evaluation_request(std::int64_t id, const SearchSpace& space,
                                      std::span<const double> candidate) {
    ordered_json body;
    body["id"] = id;
    ordered_json values = ordered_json::object();
    for (std::size_t k = 0; k < space.size(); ++k) {
        if (space[k].integral) {
            values[space[k].name] = static_cast<std::int64_t>(std::llround(candidate[k]));
        } else {
            values[space[k].name] = candidate[k];
        }
    }
    body["candidate"] = std::move(values);
    return body.dump();
}

double decode_evaluation_reply(const std::string& raw, std::int64_t expected_id) {
    json reply;
    try {
        reply = json::parse(raw);
    } catch (const json::parse_error&) {
        throw protocol_error("evaluator reply is not JSON", raw);
    } catch (const json::out_of_range&) {
        throw evaluation_error("evaluator returned a non-finite cost");
    }
    if (!reply.is_object()) throw protocol_error("evaluator reply is not an object", raw);

    const auto id = reply.find("id");
    if (id == reply.end() || !id->is_number_integer()) {
        throw protocol_error("evaluator reply has no integer id", raw);
    }
    if (id->get<std::int64_t>() != expected_id) {
        throw protocol_error("evaluator reply id " + std::to_string(id->get<std::int64_t>()) +
                                 " does not match request " + std::to_string(expected_id),
                             raw);
    }

    double cost = 0.0;
    if (const auto c = reply.find("cost"); c != reply.end()) {
        if (!c->is_number()) throw protocol_error("evaluator cost is not a number", raw);
        cost = c->get<double>();
    } else if (const auto a = reply.find("accuracy"); a != reply.end()) {
        if (!a->is_number()) throw protocol_error("evaluator accuracy is not a number", raw);
        cost = 1.0 - a->get<double>();
    } else {
        throw protocol_error("evaluator reply has no cost", raw);
    }
    if (!std::isfinite(cost)) throw evaluation_error("evaluator returned a non-finite cost");
    return cost;
}

struct ExternalProcessObjective::Child {
    pid_t pid = -1;
    int to_child = -1;
    int from_child = -1;
    std::string buffer;
};

ExternalProcessObjective::ExternalProcessObjective(std::string command, SearchSpace space,
                                                   ExternalBackendConfig config)
    : command_(std::move(command)), space_(std::move(space)), config_(config) {
    if (command_.empty()) throw config_error("external process command is empty");
    // writes to a dead child must fail with EPIPE
    ::signal(SIGPIPE, SIG_IGN);
}

ExternalProcessObjective::~ExternalProcessObjective() { stop(); }

void ExternalProcessObjective::start() {
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0) throw evaluation_error("pipe failed: " + std::string(std::strerror(errno)));
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw evaluation_error("pipe failed: " + std::string(std::strerror(errno)));
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        throw evaluation_error("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    ::setpgid(pid, pid);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
    ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);

    child_ = std::make_unique<Child>();
    child_->pid = pid;
    child_->to_child = in_pipe[1];
    child_->from_child = out_pipe[0];
}

void ExternalProcessObjective::stop() {
    if (!child_) return;
    if (child_->to_child >= 0) ::close(child_->to_child);
    if (child_->from_child >= 0) ::close(child_->from_child);
    if (child_->pid > 0) {
        ::kill(-child_->pid, SIGKILL);
        ::kill(child_->pid, SIGKILL);
        ::waitpid(child_->pid, nullptr, 0);
    }
    child_.reset();
}

namespace {

enum class ReadStatus { line, timeout, closed };

ReadStatus read_line(int fd, std::string& buffer, std::string& line,
                     std::chrono::steady_clock::time_point deadline) {
    while (true) {
        if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
            line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return ReadStatus::line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return ReadStatus::timeout;

        pollfd pfd{fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0) {
            if (errno == EINTR) continue;
            return ReadStatus::closed;
        }
        if (ready == 0) return ReadStatus::timeout;

        char chunk[4096];
        const ssize_t got = ::read(fd, chunk, sizeof chunk);
        if (got < 0 && errno == EINTR) continue;
        if (got <= 0) return ReadStatus::closed;
        buffer.append(chunk, static_cast<std::size_t>(got));
    }
}

bool write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

double ExternalProcessObjective::cost(std::span<const double> candidate) {
    std::lock_guard lock(mutex_);
    const int attempts = 1 + std::max(0, config_.retries);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (!child_) start();

        const std::int64_t id = next_id_++;
        const std::string request = encode_evaluation_request(id, space_, candidate) + "\n";
        if (!write_all(child_->to_child, request)) {
            stop();
            throw evaluation_error("external evaluator '" + command_ + "' closed its input");
        }

        std::string line;
        const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
        switch (read_line(child_->from_child, child_->buffer, line, deadline)) {
            case ReadStatus::line:
                return decode_evaluation_reply(line, id);
            case ReadStatus::closed:
                stop();
                throw evaluation_error("external evaluator '" + command_ + "' exited");
            case ReadStatus::timeout:
                break;
        }
        // restart so a late reply is never read as the answer to the next request
        stop();
    }
    throw evaluation_error("external evaluator timed out after " + std::to_string(attempts) +
                           " attempt(s)");
}

}  // namespace llmpso
