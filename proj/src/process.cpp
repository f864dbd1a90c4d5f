#include "migmine/process.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace migmine {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe() {
        if (pipe(fds) != 0)
            throw std::runtime_error("pipe() failed");
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fds[0] >= 0)
            ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0)
            ::close(fds[1]);
        fds[1] = -1;
    }
};

std::string drain(int fd) {
    std::string out;
    char buf[65536];
    ssize_t n;
    while ((n = ::read(fd, buf, sizeof(buf))) > 0)
        out.append(buf, static_cast<size_t>(n));
    return out;
}

// An unlinked temp file descriptor; used for the child's stdin and stderr so
// only stdout needs live pipe draining.
int make_temp_fd() {
    char path[] = "/tmp/migmine-io-XXXXXX";
    const int fd = mkstemp(path);
    if (fd < 0)
        throw std::runtime_error("mkstemp failed");
    ::unlink(path);
    return fd;
}

int make_stdin_fd(const std::string& data) {
    const int fd = make_temp_fd();
    size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n <= 0) {
            ::close(fd);
            throw std::runtime_error("write to temp stdin failed");
        }
        off += static_cast<size_t>(n);
    }
    ::lseek(fd, 0, SEEK_SET);
    return fd;
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string* stdin_data,
                          const std::vector<std::pair<std::string, std::string>>& extra_env) {
    if (argv.empty())
        throw std::runtime_error("run_process: empty argv");

    Pipe out_pipe;
    const int err_fd = make_temp_fd();
    int stdin_fd = -1;
    if (stdin_data)
        stdin_fd = make_stdin_fd(*stdin_data);

    const pid_t pid = fork();
    if (pid < 0) {
        ::close(err_fd);
        if (stdin_fd >= 0)
            ::close(stdin_fd);
        throw std::runtime_error("fork() failed");
    }

    if (pid == 0) {
        if (stdin_fd >= 0)
            dup2(stdin_fd, STDIN_FILENO);
        else {
            const int devnull = ::open("/dev/null", O_RDONLY);
            if (devnull >= 0)
                dup2(devnull, STDIN_FILENO);
        }
        dup2(out_pipe.fds[1], STDOUT_FILENO);
        dup2(err_fd, STDERR_FILENO);
        out_pipe.close_read();
        out_pipe.close_write();
        for (const auto& [key, value] : extra_env)
            setenv(key.c_str(), value.c_str(), 1);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const std::string& a : argv)
            args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        std::fprintf(stderr, "execvp %s: %s\n", args[0], std::strerror(errno));
        _exit(127);
    }

    if (stdin_fd >= 0)
        ::close(stdin_fd);
    out_pipe.close_write();

    ProcessResult result;
    result.out = drain(out_pipe.fds[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

    ::lseek(err_fd, 0, SEEK_SET);
    result.err = drain(err_fd);
    ::close(err_fd);
    return result;
}

} // namespace migmine
