//! A sequential event router that logs every event it carries.

use std::collections::{BTreeSet, VecDeque};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::events::{EventError, EventLog, EventMessage, Schema, HUB};
use crate::offset::Offset;

/// Component callback. Events sent through the [`Outbox`] are dispatched after
/// the current event has reached every recipient.
pub type Handler = Box<dyn FnMut(&EventMessage, &mut Outbox)>;

/// Follow-up events raised by a handler.
pub struct Outbox {
    component: String,
    pending: Vec<EventMessage>,
}

impl Outbox {
    /// Queues `e` with this component as its source.
    pub fn send(&mut self, mut e: EventMessage) {
        e.source = self.component.clone();
        self.pending.push(e);
    }

    /// Queues a reply addressed to the source of `to`.
    pub fn reply(&mut self, to: &EventMessage, name: &str) -> &mut EventMessage {
        self.send(EventMessage::new("", to.source.clone(), name));
        self.pending.last_mut().expect("just pushed")
    }
}

struct Component {
    name: String,
    subscriptions: BTreeSet<String>,
    handler: Handler,
}

/// Routes events between registered components.
///
/// An event addressed to [`HUB`] goes to every component subscribed to its
/// name, in registration order; any other target receives it directly. The
/// source never receives its own event. Every dispatched event is appended to
/// the log before delivery.
pub struct Hub {
    components: Vec<Component>,
    schema: Schema,
    log: EventLog,
    clock: Box<dyn FnMut() -> Offset>,
}

fn system_clock() -> Offset {
    let since = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    Offset::from_nanos(i64::try_from(since.as_nanos()).unwrap_or(i64::MAX))
}

impl Hub {
    /// A hub stamping events with wall-clock seconds since the Unix epoch.
    pub fn new() -> Self {
        Hub::with_clock(system_clock)
    }

    pub fn with_clock(clock: impl FnMut() -> Offset + 'static) -> Self {
        Hub {
            components: Vec::new(),
            schema: Schema::standard(),
            log: EventLog::new(),
            clock: Box::new(clock),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_mut(&mut self) -> &mut Schema {
        &mut self.schema
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.components.iter().map(|c| c.name.as_str())
    }

    pub fn register_component<'a>(
        &mut self,
        name: &str,
        subscriptions: impl IntoIterator<Item = &'a str>,
        handler: impl FnMut(&EventMessage, &mut Outbox) + 'static,
    ) -> Result<(), EventError> {
        if name == HUB || self.components.iter().any(|c| c.name == name) {
            return Err(EventError::DuplicateComponent(name.to_string()));
        }
        self.components.push(Component {
            name: name.to_string(),
            subscriptions: subscriptions.into_iter().map(str::to_string).collect(),
            handler: Box::new(handler),
        });
        Ok(())
    }

    /// Stamps `e` with the next sequence number and the current time, logs
    /// and delivers it, then dispatches any follow-up events in the order
    /// they were raised. Returns how many components received `e` itself.
    pub fn dispatch(&mut self, e: EventMessage) -> Result<usize, EventError> {
        self.schema.check(&e)?;
        let mut queue = VecDeque::from([e]);
        let mut first = None;
        while let Some(mut e) = queue.pop_front() {
            self.schema.check(&e)?;
            e.seq = self.log.last_seq().map_or(1, |s| s + 1);
            e.timestamp = (self.clock)();
            let (count, follow_ups) = self.deliver(e);
            first.get_or_insert(count);
            queue.extend(follow_ups);
        }
        Ok(first.expect("at least one event"))
    }

    /// Re-dispatches recorded events with their recorded stamps. Follow-up
    /// events are dropped because the log already holds them.
    pub fn replay(&mut self, log: &EventLog) -> Result<(), EventError> {
        for (i, e) in log.events().iter().enumerate() {
            if let Some(last) = self.log.last_seq() {
                if e.seq <= last {
                    return Err(EventError::Decode {
                        line: i + 1,
                        message: format!("sequence {} does not follow {last}", e.seq),
                    });
                }
            }
            self.schema.check(e)?;
            self.deliver(e.clone());
        }
        Ok(())
    }

    fn deliver(&mut self, e: EventMessage) -> (usize, Vec<EventMessage>) {
        self.log.push(e.clone());
        let mut count = 0;
        let mut follow_ups = Vec::new();
        for c in &mut self.components {
            let wanted = if e.target == HUB {
                c.subscriptions.contains(&e.name)
            } else {
                c.name == e.target
            };
            if !wanted || c.name == e.source {
                continue;
            }
            let mut outbox = Outbox {
                component: c.name.clone(),
                pending: Vec::new(),
            };
            (c.handler)(&e, &mut outbox);
            follow_ups.append(&mut outbox.pending);
            count += 1;
        }
        (count, follow_ups)
    }
}

impl Default for Hub {
    fn default() -> Self {
        Hub::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::rc::Rc;

    fn ticking() -> impl FnMut() -> Offset {
        let mut t = Offset::ZERO;
        move || {
            t = t.saturating_add(Offset::from_secs(1));
            t
        }
    }

    fn recorder(hub: &mut Hub, name: &str, subs: &[&str]) -> Rc<RefCell<Vec<String>>> {
        let seen = Rc::new(RefCell::new(Vec::new()));
        let sink = seen.clone();
        hub.register_component(name, subs.iter().copied(), move |e, _| {
            sink.borrow_mut().push(e.name.clone())
        })
        .unwrap();
        seen
    }

    #[test]
    fn routing_rules() {
        let mut hub = Hub::with_clock(ticking());
        let a = recorder(&mut hub, "a", &["Stop", "Play"]);
        let b = recorder(&mut hub, "b", &["Stop"]);
        assert_eq!(
            hub.dispatch(EventMessage::new("a", HUB, "Stop")).unwrap(),
            1
        );
        assert_eq!(
            hub.dispatch(EventMessage::new("x", HUB, "Stop")).unwrap(),
            2
        );
        assert_eq!(
            hub.dispatch(EventMessage::new("x", HUB, "GetRegion"))
                .unwrap(),
            0
        );
        assert_eq!(
            hub.dispatch(EventMessage::new("a", "a", "GetRegion"))
                .unwrap(),
            0
        );
        assert_eq!(
            hub.dispatch(EventMessage::new("x", "b", "GetRegion"))
                .unwrap(),
            1
        );
        assert_eq!(*a.borrow(), ["Stop"]);
        assert_eq!(*b.borrow(), ["Stop", "Stop", "GetRegion"]);
        let seqs: Vec<u64> = hub.log().events().iter().map(|e| e.seq).collect();
        assert_eq!(seqs, [1, 2, 3, 4, 5]);
        assert_eq!(hub.log().events()[4].timestamp.to_string(), "5.0");
    }

    #[test]
    fn registration_and_schema_errors() {
        let mut hub = Hub::with_clock(ticking());
        recorder(&mut hub, "a", &[]);
        assert!(matches!(
            hub.register_component("a", [], |_, _| {}),
            Err(EventError::DuplicateComponent(_))
        ));
        assert!(matches!(
            hub.register_component(HUB, [], |_, _| {}),
            Err(EventError::DuplicateComponent(_))
        ));
        let err = hub
            .dispatch(EventMessage::new("a", HUB, "Teleport"))
            .unwrap_err();
        assert!(matches!(err, EventError::Schema(_)));
        assert!(hub.log().is_empty());
    }

    #[test]
    fn follow_ups_run_after_delivery() {
        let mut hub = Hub::with_clock(ticking());
        let order = Rc::new(RefCell::new(Vec::new()));
        let o = order.clone();
        hub.register_component("main", ["GetRegion"], move |e, out| {
            o.borrow_mut().push(format!("main {}", e.name));
            let reply = out.reply(e, "SetRegion");
            reply.set("start", "0.0");
            reply.set("end", "1.0");
        })
        .unwrap();
        let o = order.clone();
        hub.register_component("other", ["GetRegion"], move |e, _| {
            o.borrow_mut().push(format!("other {}", e.name))
        })
        .unwrap();
        let o = order.clone();
        hub.register_component("asker", [], move |e, _| {
            o.borrow_mut().push(format!("asker {}", e.name))
        })
        .unwrap();
        assert_eq!(
            hub.dispatch(EventMessage::new("asker", HUB, "GetRegion"))
                .unwrap(),
            2
        );
        assert_eq!(
            *order.borrow(),
            ["main GetRegion", "other GetRegion", "asker SetRegion"]
        );
        let last = &hub.log().events()[1];
        assert_eq!(
            (last.source.as_str(), last.target.as_str(), last.seq),
            ("main", "asker", 2)
        );

        let recorded = hub.log().clone();
        let mut again = Hub::with_clock(|| panic!("replay keeps recorded stamps"));
        let seen = Rc::new(RefCell::new(0));
        let s = seen.clone();
        again
            .register_component("main", ["GetRegion"], move |e, out| {
                *s.borrow_mut() += 1;
                out.reply(e, "SetRegion");
            })
            .unwrap();
        again.replay(&recorded).unwrap();
        assert_eq!(again.log(), &recorded);
        assert_eq!(*seen.borrow(), 1);
    }

    #[test]
    fn replay_rejects_stale_sequence_numbers() {
        let mut hub = Hub::with_clock(ticking());
        hub.dispatch(EventMessage::new("x", HUB, "Stop")).unwrap();
        let log = EventLog::parse("1\t0.0\tx\thub\tStop\n").unwrap();
        assert!(matches!(
            hub.replay(&log),
            Err(EventError::Decode { line: 1, .. })
        ));
        let mut fresh = Hub::with_clock(ticking());
        fresh.replay(&EventLog::new()).unwrap();
        assert!(fresh.log().is_empty());
    }
}
