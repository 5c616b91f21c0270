/*
 * Copyright 2026 The Exposition Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "exposition/external_predictor.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "exposition/error.h"
#include "exposition/explanation.h"
#include "exposition/format.h"

extern char** environ;

namespace exposition {
namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                            Clock::now());
  return static_cast<int>(std::max<long long>(0, left.count()));
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

std::string encode_request(const Rows& rows) {
  const Schema& schema = rows.schema();
  std::string out = "{\"columns\":[";
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c > 0) out += ',';
    out += Json(schema[c].name).dump();
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < rows.n_rows(); ++r) {
    if (r > 0) out += ',';
    out += '[';
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c > 0) out += ',';
      if (schema[c].is_numeric()) {
        out += format_wire(rows(r, c));
      } else {
        out += Json(schema[c].render(rows(r, c))).dump();
      }
    }
    out += ']';
  }
  out += "]}";
  return out;
}

std::vector<double> decode_response(const std::string& line,
                                    std::size_t expected) {
  Json response;
  try {
    response = Json::parse(line);
  } catch (const Json::exception&) {
    throw ProtocolError("malformed response line: " + line.substr(0, 200));
  }
  if (!response.is_object() || !response.contains("predictions") ||
      !response["predictions"].is_array()) {
    throw ProtocolError("response lacks a \"predictions\" array");
  }
  const Json& predictions = response["predictions"];
  if (predictions.size() != expected) {
    throw ProtocolError("expected " + std::to_string(expected) +
                        " predictions, got " +
                        std::to_string(predictions.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const Json& p : predictions) {
    if (!p.is_number()) throw ProtocolError("non-numeric prediction");
    const double v = p.get<double>();
    if (!std::isfinite(v)) throw ProtocolError("non-finite prediction");
    out.push_back(v);
  }
  return out;
}

Rows decode_request(const std::string& line,
                    const std::shared_ptr<const Schema>& schema) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::exception&) {
    throw ProtocolError("malformed request line");
  }
  if (!request.is_object() || !request.contains("columns") ||
      !request.contains("rows") || !request["columns"].is_array() ||
      !request["rows"].is_array()) {
    throw ProtocolError("request needs \"columns\" and \"rows\" arrays");
  }
  const Json& columns = request["columns"];
  // position[c] = index of schema column c inside each request row.
  std::vector<std::size_t> position(schema->size(), columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!columns[i].is_string()) throw ProtocolError("column names must be strings");
    for (std::size_t c = 0; c < schema->size(); ++c) {
      if ((*schema)[c].name == columns[i].get<std::string>()) position[c] = i;
    }
  }
  for (std::size_t c = 0; c < schema->size(); ++c) {
    if (position[c] == columns.size()) {
      throw ProtocolError("request lacks column '" + (*schema)[c].name + "'");
    }
  }
  const Json& rows = request["rows"];
  Rows out(schema, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != columns.size()) {
      throw ProtocolError("row " + std::to_string(r) + " has the wrong width");
    }
    for (std::size_t c = 0; c < schema->size(); ++c) {
      const Json& cell = rows[r][position[c]];
      const ColumnSchema& column = (*schema)[c];
      try {
        if (column.is_numeric()) {
          if (!cell.is_number()) throw ProtocolError("expected a number");
          out(r, c) = cell.get<double>();
        } else {
          if (!cell.is_string()) throw ProtocolError("expected a level name");
          out(r, c) = column.parse(cell.get<std::string>());
        }
      } catch (const Error& e) {
        throw ProtocolError("row " + std::to_string(r) + ", column '" +
                            column.name + "': " + e.what());
      }
    }
  }
  return out;
}

std::string encode_response(std::span<const double> predictions) {
  std::string out = "{\"predictions\":[";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (i > 0) out += ',';
    out += format_wire(predictions[i]);
  }
  out += "]}";
  return out;
}

ExternalPredictor::ExternalPredictor(std::vector<std::string> command,
                                     std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) throw ParameterError("external command is empty");
  // A dead child must surface as EPIPE, not kill the host.
  ::signal(SIGPIPE, SIG_IGN);
}

ExternalPredictor::~ExternalPredictor() {
  std::lock_guard lock(mutex_);
  shutdown();
}

void ExternalPredictor::spawn() const {
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  char path[] = "/tmp/exposition-stderr-XXXXXX";
  stderr_fd_ = ::mkostemp(path, O_CLOEXEC);
  if (stderr_fd_ >= 0) ::unlink(path);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  if (stderr_fd_ >= 0) {
    posix_spawn_file_actions_adddup2(&actions, stderr_fd_, STDERR_FILENO);
  }
  std::vector<char*> argv;
  for (const auto& arg : command_) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(),
                                environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    close_fd(stderr_fd_);
    throw ProtocolError("cannot spawn '" + command_.front() +
                        "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  pending_.clear();
}

void ExternalPredictor::shutdown() const {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    // Closing stdin asks a well-behaved child to exit; give it a moment.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      ::usleep(2000);
    }
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
  close_fd(stderr_fd_);
  pending_.clear();
}

std::string ExternalPredictor::child_stderr() const {
  if (stderr_fd_ < 0) return "";
  std::string out;
  char buffer[4096];
  ::lseek(stderr_fd_, 0, SEEK_SET);
  ssize_t n;
  while ((n = ::read(stderr_fd_, buffer, sizeof(buffer))) > 0 &&
         out.size() < 8192) {
    out.append(buffer, static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<double> ExternalPredictor::predict(const Rows& rows) const {
  if (rows.n_rows() == 0) return {};
  std::lock_guard lock(mutex_);
  if (pid_ < 0) spawn();
  const auto deadline = Clock::now() + timeout_;

  auto fail = [&](const std::string& what) -> ProtocolError {
    // Let the child finish dying so its stderr is complete.
    close_fd(to_child_);
    int status = 0;
    for (int i = 0; i < 100 && ::waitpid(pid_, &status, WNOHANG) == 0; ++i) {
      ::usleep(2000);
    }
    std::string message = what;
    const std::string err = child_stderr();
    if (!err.empty()) message += "; stderr: " + err;
    shutdown();
    return ProtocolError(message);
  };

  const std::string request = encode_request(rows) + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    pollfd pfd{to_child_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready == 0) {
      shutdown();
      throw TimeoutError("external predictor did not accept input in time");
    }
    if (ready < 0 && errno == EINTR) continue;
    const ssize_t n = ::write(to_child_, request.data() + written,
                              request.size() - written);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw fail("external predictor closed its input");
    }
    written += static_cast<std::size_t>(n);
  }

  std::string line;
  for (;;) {
    const auto newline = pending_.find('\n');
    if (newline != std::string::npos) {
      line = pending_.substr(0, newline);
      pending_.erase(0, newline + 1);
      break;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready == 0) {
      shutdown();
      throw TimeoutError("external predictor did not answer within " +
                         std::to_string(timeout_.count()) + " ms");
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw fail(std::string("poll: ") + std::strerror(errno));
    }
    char buffer[65536];
    const ssize_t n = ::read(from_child_, buffer, sizeof(buffer));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw fail(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) throw fail("external predictor exited mid-call");
    pending_.append(buffer, static_cast<std::size_t>(n));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  try {
    return decode_response(line, rows.n_rows());
  } catch (const ProtocolError&) {
    // The stream position is no longer trustworthy.
    shutdown();
    throw;
  }
}

}  // namespace exposition
