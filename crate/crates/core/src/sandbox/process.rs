//! Spawning a child under rlimits, feeding stdin, capturing capped output and
//! enforcing the wall-clock and resident-memory watchdogs.

use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use super::{ExitStatus, SandboxError};

const POLL: Duration = Duration::from_millis(5);
const MIB: u64 = 1 << 20;

#[derive(Debug, Clone, Default)]
pub(crate) struct RunOptions {
    pub wall_limit_ms: u64,
    pub address_space_mib: Option<u64>,
    pub stack_mib: Option<u64>,
    pub cpu_limit_s: Option<u64>,
    /// Kill the child once its resident set exceeds this many bytes.
    pub rss_kill_bytes: Option<u64>,
    pub output_limit: u64,
    pub stderr_limit: u64,
}

#[derive(Debug)]
pub(crate) struct RawRun {
    pub exit: ExitStatus,
    pub cpu_time_ms: u64,
    pub wall_time_ms: u64,
    pub peak_rss_bytes: u64,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
    pub truncated: bool,
    pub wall_killed: bool,
}

fn stripped_env() -> impl Iterator<Item = (String, String)> {
    std::env::vars().filter(|(k, _)| !k.starts_with("HACKFORGE_"))
}

pub(crate) fn run(argv: &[String], cwd: &Path, input: &[u8], opts: &RunOptions) -> Result<RawRun, SandboxError> {
    let (program, args) = argv
        .split_first()
        .ok_or_else(|| SandboxError::Failure("empty command line".into()))?;

    let mut cmd = Command::new(program);
    cmd.args(args)
        .current_dir(cwd)
        .env_clear()
        .envs(stripped_env())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0);

    let limits = (opts.address_space_mib, opts.stack_mib, opts.cpu_limit_s);
    // SAFETY: only async-signal-safe setrlimit calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            let set = |res, value: u64| -> std::io::Result<()> {
                let lim = libc::rlimit { rlim_cur: value as libc::rlim_t, rlim_max: value as libc::rlim_t };
                if libc::setrlimit(res, &lim) != 0 {
                    return Err(std::io::Error::last_os_error());
                }
                Ok(())
            };
            set(libc::RLIMIT_CORE, 0)?;
            if let Some(mib) = limits.0 {
                set(libc::RLIMIT_AS, mib * MIB)?;
            }
            if let Some(mib) = limits.1 {
                set(libc::RLIMIT_STACK, mib * MIB)?;
            }
            if let Some(s) = limits.2 {
                set(libc::RLIMIT_CPU, s)?;
            }
            Ok(())
        });
    }

    let started = Instant::now();
    let mut child = cmd
        .spawn()
        .map_err(|e| SandboxError::Failure(format!("cannot spawn {program}: {e}")))?;
    let pid = child.id() as libc::pid_t;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = input.to_vec();
    let writer = thread::spawn(move || {
        // A child that exits without reading its input yields EPIPE; that is fine.
        let _ = stdin.write_all(&input);
    });

    let overflow = Arc::new(AtomicBool::new(false));
    let stdout = child.stdout.take().expect("piped stdout");
    let stderr = child.stderr.take().expect("piped stderr");
    let out_reader = spawn_capped_reader(stdout, opts.output_limit, Some(overflow.clone()));
    let err_reader = spawn_capped_reader(stderr, opts.stderr_limit, None);

    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut status: libc::c_int = 0;
        let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
        loop {
            // SAFETY: pid is our direct child; status/usage are valid out-pointers.
            let r = unsafe { libc::wait4(pid, &mut status, 0, &mut usage) };
            if r == pid {
                let _ = tx.send(Ok((status, usage)));
                return;
            }
            let err = std::io::Error::last_os_error();
            if err.kind() != std::io::ErrorKind::Interrupted {
                let _ = tx.send(Err(err));
                return;
            }
        }
    });

    let wall_limit = Duration::from_millis(opts.wall_limit_ms);
    let mut wall_killed = false;
    let mut rss_killed = false;
    let mut peak_sampled = 0u64;
    let mut killed = false;
    let (status, usage) = loop {
        match rx.recv_timeout(POLL) {
            Ok(Ok(res)) => break res,
            Ok(Err(e)) => return Err(SandboxError::Failure(format!("wait4 failed: {e}"))),
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                return Err(SandboxError::Failure("wait thread vanished".into()))
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                if killed {
                    continue;
                }
                if let Some(rss) = sample_rss(pid) {
                    peak_sampled = peak_sampled.max(rss);
                    if opts.rss_kill_bytes.is_some_and(|cap| rss > cap) {
                        rss_killed = true;
                    }
                }
                if started.elapsed() >= wall_limit {
                    wall_killed = true;
                }
                if wall_killed || rss_killed || overflow.load(Ordering::Relaxed) {
                    kill_group(pid);
                    killed = true;
                }
            }
        }
    };
    let wall_time_ms = started.elapsed().as_millis() as u64;
    // Reap stragglers in the group so the pipes close.
    kill_group(pid);

    let _ = writer.join();
    let (stdout, truncated) = out_reader.join().map_err(|_| SandboxError::Failure("stdout reader panicked".into()))?;
    let (stderr, _) = err_reader.join().map_err(|_| SandboxError::Failure("stderr reader panicked".into()))?;
    // The pid has been reaped by wait4; make sure std does not try again.
    std::mem::forget(child);

    let exit = if libc::WIFSIGNALED(status) {
        ExitStatus::Signaled(libc::WTERMSIG(status))
    } else {
        ExitStatus::Code(libc::WEXITSTATUS(status))
    };
    let cpu = |tv: libc::timeval| tv.tv_sec as u64 * 1000 + tv.tv_usec as u64 / 1000;
    let cpu_time_ms = cpu(usage.ru_utime) + cpu(usage.ru_stime);
    // ru_maxrss is reported in KiB on Linux.
    let peak_rss_bytes = (usage.ru_maxrss as u64 * 1024).max(peak_sampled);

    Ok(RawRun { exit, cpu_time_ms, wall_time_ms, peak_rss_bytes, stdout, stderr, truncated, wall_killed })
}

fn kill_group(pid: libc::pid_t) {
    // SAFETY: signalling our own process group; failure (already gone) is ignored.
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
}

fn sample_rss(pid: libc::pid_t) -> Option<u64> {
    let statm = std::fs::read_to_string(format!("/proc/{pid}/statm")).ok()?;
    let resident: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    // SAFETY: sysconf has no preconditions.
    let page = unsafe { libc::sysconf(libc::_SC_PAGESIZE) } as u64;
    Some(resident * page)
}

fn spawn_capped_reader<R: Read + Send + 'static>(
    mut stream: R,
    cap: u64,
    overflow: Option<Arc<AtomicBool>>,
) -> thread::JoinHandle<(Vec<u8>, bool)> {
    thread::spawn(move || {
        let mut kept = Vec::new();
        let mut truncated = false;
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = match stream.read(&mut buf) {
                Ok(0) | Err(_) => break,
                Ok(n) => n,
            };
            let room = cap.saturating_sub(kept.len() as u64) as usize;
            if n > room {
                kept.extend_from_slice(&buf[..room]);
                if !truncated {
                    truncated = true;
                    if let Some(flag) = &overflow {
                        flag.store(true, Ordering::Relaxed);
                    }
                }
            } else {
                kept.extend_from_slice(&buf[..n]);
            }
        }
        (kept, truncated)
    })
}
