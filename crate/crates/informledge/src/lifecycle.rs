//! Link lifecycle: usage tracking, fading of rarely used links, and their
//! later recreation.
//!
//! Fading runs on an explicit tick clock rather than wall time; ticks
//! advance once per retrieval batch. A faded link keeps its descriptor in
//! the dormant area, vanishes from traversal immediately, and can be
//! recreated bit-for-bit later.

use thiserror::Error;

use crate::model::{Link, LinkId, LinkState};
use crate::store::{Store, StoreError};

/// When an active link fades: not used at least `min_usage` times and idle
/// for `window` ticks or more.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadePolicy {
    pub window: u64,
    pub min_usage: u64,
}

impl FadePolicy {
    pub fn new(window: u64, min_usage: u64) -> Result<Self, LifecycleError> {
        if window == 0 || min_usage == 0 {
            return Err(LifecycleError::InvalidPolicy);
        }
        Ok(Self { window, min_usage })
    }
}

/// Links faded by one `fade_tick` pass, in id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FadeReport {
    pub faded: Vec<LinkId>,
}

impl FadeReport {
    pub fn is_empty(&self) -> bool {
        self.faded.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LifecycleError {
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("link {0} has faded")]
    FadedLink(LinkId),
    #[error("link {0} is not faded")]
    NotFaded(LinkId),
    #[error("fade policy needs window >= 1 and min_usage >= 1")]
    InvalidPolicy,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Records one traversal of an active link at tick `now`.
pub fn touch_link(store: &mut Store, id: LinkId, now: u64) -> Result<(), LifecycleError> {
    let link = store
        .link(id)
        .ok_or(LifecycleError::UnknownLink(id))?;
    if link.state == LinkState::Faded {
        return Err(LifecycleError::FadedLink(id));
    }
    let link = store.link_mut(id).expect("link exists");
    link.usage += 1;
    link.last_used = now;
    Ok(())
}

/// Fades every active link that is both under-used and idle at tick `now`.
/// Repeating the call at the same tick fades nothing new.
pub fn fade_tick(store: &mut Store, policy: FadePolicy, now: u64) -> FadeReport {
    let candidates: Vec<LinkId> = store
        .links()
        .filter(|link| {
            link.state == LinkState::Active
                && link.usage < policy.min_usage
                && now.saturating_sub(link.last_used) >= policy.window
        })
        .map(|link| link.id)
        .collect();
    for id in &candidates {
        store.deactivate_link(*id);
    }
    FadeReport { faded: candidates }
}

/// Brings a faded link back into traversal. The descriptor and endpoints
/// come back exactly as they faded; the usage counter restarts at zero.
pub fn recreate_link(store: &mut Store, id: LinkId) -> Result<Link, LifecycleError> {
    let link = store
        .link(id)
        .ok_or(LifecycleError::UnknownLink(id))?;
    if link.state != LinkState::Faded {
        return Err(LifecycleError::NotFaded(id));
    }
    store.reactivate_link(id)?;
    let link = store.link_mut(id).expect("link exists");
    link.usage = 0;
    Ok(link.clone())
}
