#include "rtlagent/support/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "rtlagent/support/strings.hpp"

extern char** environ;

namespace rtlagent::support {

namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe()
  {
    if (::pipe(fds) != 0)
      throw SpawnError("pipe() failed");
  }
  ~Pipe()
  {
    close_read();
    close_write();
  }
  void close_read()
  {
    if (fds[0] >= 0)
      ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write()
  {
    if (fds[1] >= 0)
      ::close(fds[1]);
    fds[1] = -1;
  }
};

void drain(int fd, std::string& sink)
{
  char buf[4096];
  while (true) {
    const ssize_t n = ::read(fd, buf, sizeof buf);
    if (n <= 0)
      return;
    sink.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace

RunResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                      std::chrono::milliseconds timeout)
{
  if (argv.empty())
    throw SpawnError("empty argv");

  Pipe out_pipe;
  Pipe err_pipe;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out_pipe.fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_pipe.fds[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, out_pipe.fds[0]);
  posix_spawn_file_actions_addclose(&actions, err_pipe.fds[0]);
  if (!cwd.empty())
    posix_spawn_file_actions_addchdir_np(&actions, cwd.c_str());

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv)
    cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0)
    throw SpawnError(std::string("cannot start '") + argv[0] + "': " + std::strerror(rc));

  out_pipe.close_write();
  err_pipe.close_write();

  RunResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open) {
    struct pollfd fds[2];
    nfds_t n = 0;
    if (out_open)
      fds[n++] = {out_pipe.fds[0], POLLIN, 0};
    if (err_open)
      fds[n++] = {err_pipe.fds[0], POLLIN, 0};
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    const auto wait_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int pr = ::poll(fds, n, static_cast<int>(wait_ms));
    if (pr < 0) {
      if (errno == EINTR)
        continue;
      break;
    }
    if (pr == 0) {
      result.timed_out = true;
      break;
    }
    for (nfds_t i = 0; i < n; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
        continue;
      char buf[4096];
      const ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
      const bool is_out = fds[i].fd == out_pipe.fds[0];
      if (got > 0) {
        (is_out ? result.out : result.err).append(buf, static_cast<std::size_t>(got));
      } else {
        if (is_out)
          out_open = false;
        else
          err_open = false;
      }
    }
  }

  if (result.timed_out) {
    ::kill(pid, SIGKILL);
    // Pick up anything the child flushed before dying.
    drain(out_pipe.fds[0], result.out);
    drain(err_pipe.fds[0], result.err);
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

bool binary_on_path(const std::string& binary)
{
  const auto executable = [](const std::filesystem::path& p) {
    struct stat st{};
    return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
  };
  if (binary.find('/') != std::string::npos)
    return executable(binary);
  const char* path = std::getenv("PATH");
  if (!path)
    return false;
  for (const auto& dir : split(path, ':')) {
    if (dir.empty())
      continue;
    if (executable(std::filesystem::path(dir) / binary))
      return true;
  }
  return false;
}

}  // namespace rtlagent::support
