//! Exchange pulse schedules serialize to JSON and back; the reloaded
//! schedule reproduces the same unitary.

use dfsforge::gates::{emitted_schedules, PulseSchedule};

fn main() -> dfsforge::error::Result<()> {
    for (name, sched) in emitted_schedules()? {
        let json = sched.to_json()?;
        let back = PulseSchedule::from_json(&json)?;
        println!("{name}: {} pulses on {} qubits, round trip {}", sched.len(), sched.num_qubits(), back == sched);
    }
    let (_, not) = emitted_schedules()?.swap_remove(1);
    println!("{}", not.to_json()?);
    Ok(())
}
