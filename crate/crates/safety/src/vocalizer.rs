//! Audible warnings on entry into a reactive class.

use crate::classify::Class;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VocalEvent {
    pub time: f64,
    pub track_id: u32,
    pub class: Class,
}

/// One event per entry into blue or red, including a first label that is
/// already reactive. Repeats of the same class stay silent.
pub fn vocalizer_events(track_id: u32, labels: &[(f64, Class)]) -> Vec<VocalEvent> {
    let mut previous: Option<Class> = None;
    let mut events = Vec::new();
    for &(time, class) in labels {
        if class.is_reactive() && previous != Some(class) {
            events.push(VocalEvent { time, track_id, class });
        }
        previous = Some(class);
    }
    events
}

/// `time,track_id,class,event`.
pub fn events_csv(events: &[VocalEvent]) -> String {
    let mut out = String::from("time,track_id,class,event\n");
    for e in events {
        out.push_str(&format!("{},{},{},vocalize\n", e.time, e.track_id, e.class));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Class::*;

    fn run(seq: &[Class]) -> usize {
        let labels: Vec<_> = seq.iter().enumerate().map(|(i, &c)| (i as f64, c)).collect();
        vocalizer_events(0, &labels).len()
    }

    #[test]
    fn transition_rule() {
        assert_eq!(run(&[Green, Blue, Red]), 2);
        assert_eq!(run(&[Green, Green, Green]), 0);
        assert_eq!(run(&[Red, Blue, Red]), 3);
        assert_eq!(run(&[Blue, Blue, Green, Blue]), 2);
        let csv = events_csv(&vocalizer_events(7, &[(0.5, Green), (1.0, Red)]));
        assert_eq!(csv, "time,track_id,class,event\n1,7,red,vocalize\n");
    }
}
