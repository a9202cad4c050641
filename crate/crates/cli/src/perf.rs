//! Cycle and instruction counts for the calling thread via `perf_event_open`.
//! Opening fails quietly wherever the kernel does not allow it.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CounterValues {
    pub cycles: u64,
    pub instructions: u64,
}

#[cfg(target_os = "linux")]
mod imp {
    use super::CounterValues;

    const PERF_TYPE_HARDWARE: u32 = 0;
    const PERF_COUNT_HW_CPU_CYCLES: u64 = 0;
    const PERF_COUNT_HW_INSTRUCTIONS: u64 = 1;

    const FLAG_DISABLED: u64 = 1 << 0;
    const FLAG_EXCLUDE_KERNEL: u64 = 1 << 5;
    const FLAG_EXCLUDE_HV: u64 = 1 << 6;

    const PERF_FLAG_FD_CLOEXEC: libc::c_ulong = 1 << 3;

    const IOC_ENABLE: libc::c_ulong = 0x2400;
    const IOC_DISABLE: libc::c_ulong = 0x2401;
    const IOC_RESET: libc::c_ulong = 0x2403;
    const IOC_FLAG_GROUP: libc::c_ulong = 1;

    // The fixed part of `struct perf_event_attr` up to `sample_max_stack`.
    #[repr(C)]
    #[derive(Default)]
    struct PerfEventAttr {
        kind: u32,
        size: u32,
        config: u64,
        sample_period: u64,
        sample_type: u64,
        read_format: u64,
        flags: u64,
        wakeup_events: u32,
        bp_type: u32,
        config1: u64,
        config2: u64,
        branch_sample_type: u64,
        sample_regs_user: u64,
        sample_stack_user: u32,
        clockid: i32,
        sample_regs_intr: u64,
        aux_watermark: u32,
        sample_max_stack: u16,
        reserved: u16,
    }

    fn open(config: u64, group: libc::c_int) -> Option<libc::c_int> {
        let mut attr = PerfEventAttr {
            kind: PERF_TYPE_HARDWARE,
            size: std::mem::size_of::<PerfEventAttr>() as u32,
            config,
            flags: FLAG_EXCLUDE_KERNEL | FLAG_EXCLUDE_HV,
            ..Default::default()
        };
        if group < 0 {
            attr.flags |= FLAG_DISABLED;
        }
        // SAFETY: attr is a valid, fully initialized perf_event_attr prefix
        // whose size field matches its layout.
        let fd = unsafe {
            libc::syscall(
                libc::SYS_perf_event_open,
                &attr as *const PerfEventAttr,
                0 as libc::pid_t,
                -1 as libc::c_int,
                group,
                PERF_FLAG_FD_CLOEXEC,
            )
        };
        (fd >= 0).then_some(fd as libc::c_int)
    }

    fn read_counter(fd: libc::c_int) -> Option<u64> {
        let mut value = 0u64;
        // SAFETY: reading 8 bytes into a u64 owned by this frame.
        let n = unsafe { libc::read(fd, (&mut value as *mut u64).cast(), 8) };
        (n == 8).then_some(value)
    }

    pub struct Counters {
        cycles: libc::c_int,
        instructions: libc::c_int,
    }

    impl Counters {
        pub fn open() -> Option<Self> {
            let cycles = open(PERF_COUNT_HW_CPU_CYCLES, -1)?;
            let Some(instructions) = open(PERF_COUNT_HW_INSTRUCTIONS, cycles) else {
                unsafe { libc::close(cycles) };
                return None;
            };
            Some(Counters { cycles, instructions })
        }

        pub fn start(&mut self) {
            unsafe {
                libc::ioctl(self.cycles, IOC_RESET, IOC_FLAG_GROUP);
                libc::ioctl(self.cycles, IOC_ENABLE, IOC_FLAG_GROUP);
            }
        }

        pub fn stop(&mut self) -> Option<CounterValues> {
            unsafe { libc::ioctl(self.cycles, IOC_DISABLE, IOC_FLAG_GROUP) };
            Some(CounterValues {
                cycles: read_counter(self.cycles)?,
                instructions: read_counter(self.instructions)?,
            })
        }
    }

    impl Drop for Counters {
        fn drop(&mut self) {
            unsafe {
                libc::close(self.instructions);
                libc::close(self.cycles);
            }
        }
    }
}

#[cfg(not(target_os = "linux"))]
mod imp {
    use super::CounterValues;

    pub struct Counters;

    impl Counters {
        pub fn open() -> Option<Self> {
            None
        }

        pub fn start(&mut self) {}

        pub fn stop(&mut self) -> Option<CounterValues> {
            None
        }
    }
}

/// A cycles + instructions counter group for this thread.
pub struct HardwareCounters(imp::Counters);

impl HardwareCounters {
    /// `None` if the platform or its permissions do not allow counting.
    pub fn open() -> Option<Self> {
        let mut counters = imp::Counters::open()?;
        // some virtualized hosts open the events but never count
        counters.start();
        std::hint::black_box((0..1000u64).sum::<u64>());
        let probe = counters.stop()?;
        (probe.cycles > 0 && probe.instructions > 0).then_some(HardwareCounters(counters))
    }

    pub fn start(&mut self) {
        self.0.start()
    }

    pub fn stop(&mut self) -> Option<CounterValues> {
        self.0.stop()
    }
}
