#include "treemin/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <boost/program_options/parsers.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

namespace treemin {

namespace fs = std::filesystem;

std::vector<std::string> split_command(const std::string& command_line) {
  std::vector<std::string> out;
  try {
    out = boost::program_options::split_unix(command_line);
  } catch (const std::exception& e) {
    throw OracleError("cannot split test command '" + command_line + "': " + e.what());
  }
  if (out.empty()) throw OracleError("empty test command");
  return out;
}

std::vector<std::string> resolve_program(std::vector<std::string> command, const std::string& base_dir) {
  if (!command.empty()) {
    fs::path program(command.front());
    if (program.is_relative() && command.front().find('/') != std::string::npos) {
      command.front() = (fs::absolute(base_dir) / program).lexically_normal().string();
    }
  }
  return command;
}

CommandOracle::CommandOracle(OracleConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) throw OracleError("test command must not be empty");
  if (!(config_.timeout_seconds > 0)) throw OracleError("timeout must be positive");
  if (config_.workdir.empty()) {
    std::string tmpl = (fs::temp_directory_path() / "treemin-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw OracleError("cannot create temporary directory");
    owned_dir_ = tmpl;
    config_.workdir = tmpl;
  }
  fs::create_directories(config_.workdir);
  candidate_path_ = (fs::absolute(config_.workdir) / config_.candidate_name).string();
}

CommandOracle::~CommandOracle() {
  if (!owned_dir_.empty()) {
    std::error_code ec;
    fs::remove_all(owned_dir_, ec);
  }
}

namespace {

int open_log(const std::string& path) {
  if (path.empty()) return open("/dev/null", O_WRONLY | O_CLOEXEC);
  return open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
}

// Waits for `pid` up to `timeout`; returns false on timeout.
bool wait_with_timeout(pid_t pid, std::chrono::duration<double> timeout, int& status) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int pidfd = static_cast<int>(syscall(SYS_pidfd_open, pid, 0));
  if (pidfd >= 0) {
    while (true) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() < 0) break;
      pollfd p{pidfd, POLLIN, 0};
      int rc = poll(&p, 1, static_cast<int>(left.count()) + 1);
      if (rc > 0) {
        close(pidfd);
        return waitpid(pid, &status, 0) == pid;
      }
      if (rc < 0 && errno != EINTR) break;
      if (rc == 0 && std::chrono::steady_clock::now() >= deadline) break;
    }
    close(pidfd);
    return waitpid(pid, &status, WNOHANG) == pid;
  }
  auto delay = std::chrono::microseconds(200);
  while (std::chrono::steady_clock::now() < deadline) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) return true;
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, std::chrono::microseconds(10000));
  }
  return waitpid(pid, &status, WNOHANG) == pid;
}

std::vector<std::string> minimal_environment() {
  std::vector<std::string> env;
  for (const char* name : {"PATH", "HOME", "TREEMIN"}) {
    if (const char* v = std::getenv(name)) env.push_back(std::string(name) + "=" + v);
  }
  return env;
}

}  // namespace

Outcome CommandOracle::evaluate(const std::string& text) {
  {
    std::ofstream out(candidate_path_, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
      spdlog::error("cannot write candidate file {}", candidate_path_);
      return Outcome::Unresolved;
    }
  }

  std::vector<std::string> argv_storage;
  for (const auto& arg : config_.command) argv_storage.push_back(arg == "{}" ? candidate_path_ : arg);
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::vector<std::string> env_storage;
  std::vector<char*> envp;
  if (!config_.pass_environment) {
    env_storage = minimal_environment();
    for (auto& e : env_storage) envp.push_back(e.data());
    envp.push_back(nullptr);
  }

  int log_fd = open_log(config_.log_path);
  int report[2];
  if (pipe2(report, O_CLOEXEC) != 0) {
    if (log_fd >= 0) close(log_fd);
    return Outcome::Unresolved;
  }
  const std::string workdir = config_.workdir;

  pid_t pid = fork();
  if (pid == 0) {
    setpgid(0, 0);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    if (log_fd >= 0) {
      dup2(log_fd, STDOUT_FILENO);
      dup2(log_fd, STDERR_FILENO);
    }
    if (chdir(workdir.c_str()) == 0) {
      if (config_.pass_environment) {
        execvp(argv[0], argv.data());
      } else {
        execvpe(argv[0], argv.data(), envp.data());
      }
    }
    int err = errno;
    ssize_t ignored = write(report[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }
  close(report[1]);
  if (log_fd >= 0) close(log_fd);
  if (pid < 0) {
    close(report[0]);
    if (!spawn_failure_logged_) {
      spdlog::error("cannot fork test command: {}", std::strerror(errno));
      spawn_failure_logged_ = true;
    }
    return Outcome::Unresolved;
  }

  int exec_errno = 0;
  ssize_t got = read(report[0], &exec_errno, sizeof exec_errno);
  close(report[0]);
  int status = 0;
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    waitpid(pid, &status, 0);
    if (!spawn_failure_logged_) {
      spdlog::error("cannot run test command '{}': {}", config_.command.front(), std::strerror(exec_errno));
      spawn_failure_logged_ = true;
    }
    return Outcome::Unresolved;
  }

  if (!wait_with_timeout(pid, std::chrono::duration<double>(config_.timeout_seconds), status)) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    spdlog::debug("test command timed out after {} s", config_.timeout_seconds);
    return Outcome::Unresolved;
  }
  if (WIFEXITED(status)) {
    switch (WEXITSTATUS(status)) {
      case 0: return Outcome::Fail;
      case 1: return Outcome::Pass;
      default: return Outcome::Unresolved;
    }
  }
  return Outcome::Unresolved;
}

Outcome evaluate(const OracleConfig& config, const std::string& text) {
  CommandOracle oracle(config);
  return oracle.evaluate(text);
}

std::string sha256(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw OracleError("SHA-256 computation failed");
  }
  return std::string(reinterpret_cast<const char*>(digest), len);
}

CachedOracle::CachedOracle(Evaluator evaluator) : evaluator_(std::move(evaluator)) {}

Outcome CachedOracle::operator()(const std::string& text) {
  std::string key = sha256(text);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++steps_.hits;
    return it->second;
  }
  ++steps_.invocations;
  Outcome o = evaluator_(text);
  cache_.emplace(std::move(key), o);
  return o;
}

Evaluator CachedOracle::as_evaluator() {
  return [this](const std::string& text) { return (*this)(text); };
}

}  // namespace treemin
