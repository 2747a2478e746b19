//! Interactive state-space animation.

use std::io::{BufRead, Write};

use fspv_core::{Label, Lts, Target};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Walks an LTS from state 0, keeping the path taken as an undo stack.
pub struct Explorer<'a> {
    lts: &'a Lts,
    path: Vec<(usize, Target)>,
    rng: ChaCha8Rng,
}

impl<'a> Explorer<'a> {
    pub fn new(lts: &'a Lts, seed: u64) -> Self {
        Explorer { lts, path: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn current(&self) -> Target {
        self.path.last().map_or(Target::State(0), |&(_, t)| t)
    }

    /// Enabled transitions as `(label index, target)`; empty in ERROR.
    pub fn menu(&self) -> &'a [(usize, Target)] {
        match self.current() {
            Target::State(s) => &self.lts.transitions[s],
            Target::Error => &[],
        }
    }

    /// ERROR, or a state with nothing enabled.
    pub fn is_stuck(&self) -> bool {
        self.menu().is_empty()
    }

    /// Takes menu entry `choice` (0-based).
    pub fn step(&mut self, choice: usize) -> Option<Target> {
        let &(l, t) = self.menu().get(choice)?;
        self.path.push((l, t));
        Some(t)
    }

    pub fn back(&mut self) -> bool {
        self.path.pop().is_some()
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn trace(&self) -> Vec<Label> {
        self.path.iter().map(|&(l, _)| self.lts.label(l).clone()).collect()
    }

    /// Up to `n` uniformly random steps; stops early when stuck. Returns
    /// the number of steps taken.
    pub fn random(&mut self, n: usize) -> usize {
        for taken in 0..n {
            let k = self.menu().len();
            if k == 0 {
                return taken;
            }
            let i = self.rng.random_range(0..k);
            self.step(i);
        }
        n
    }
}

fn state_name(t: Target) -> String {
    match t {
        Target::State(s) => s.to_string(),
        Target::Error => "ERROR".into(),
    }
}

fn show(ex: &Explorer<'_>, lts: &Lts, out: &mut dyn Write) -> std::io::Result<()> {
    let cur = ex.current();
    writeln!(out, "state {}", state_name(cur))?;
    match cur {
        Target::Error => writeln!(out, "*** ERROR reached: property violated (back or quit) ***")?,
        Target::State(s) if ex.is_stuck() => {
            if lts.end_states.contains(&s) {
                writeln!(out, "*** END: terminated successfully (back or quit) ***")?
            } else {
                writeln!(out, "*** terminal state: no actions enabled (back or quit) ***")?
            }
        }
        Target::State(s) => {
            if lts.end_states.contains(&s) {
                writeln!(out, "(end state)")?;
            }
            for (i, (l, t)) in ex.menu().iter().enumerate() {
                writeln!(out, "  {}) {} -> {}", i + 1, lts.label(*l), state_name(*t))?;
            }
        }
    }
    Ok(())
}

const HELP: &str = "commands: <number> | back | trace | random N | quit";

/// Runs a command session over `input` until `quit` or end of input.
pub fn session(lts: &Lts, seed: u64, input: &mut dyn BufRead, out: &mut dyn Write) -> std::io::Result<()> {
    let mut ex = Explorer::new(lts, seed);
    writeln!(out, "exploring {} ({} states); {HELP}", lts.name, lts.num_states())?;
    show(&ex, lts, out)?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => continue,
            ["quit"] | ["q"] => return Ok(()),
            ["back"] | ["b"] => {
                if !ex.back() {
                    writeln!(out, "already at the initial state")?;
                }
            }
            ["trace"] | ["t"] => {
                for (i, l) in ex.trace().iter().enumerate() {
                    writeln!(out, "  {:>3} {l}", i + 1)?;
                }
                continue;
            }
            ["random", n] | ["r", n] if !ex.is_stuck() => match n.parse::<usize>() {
                Ok(n) => {
                    let taken = ex.random(n);
                    writeln!(out, "took {taken} random step(s)")?;
                }
                Err(_) => {
                    writeln!(out, "not a step count: {n}")?;
                    continue;
                }
            },
            [n] if !ex.is_stuck() && n.parse::<usize>().is_ok() => {
                let k: usize = n.parse().unwrap();
                if k == 0 || ex.step(k - 1).is_none() {
                    writeln!(out, "no choice {k}; pick 1..{}", ex.menu().len())?;
                    continue;
                }
            }
            _ if ex.is_stuck() => {
                writeln!(out, "only back, trace or quit here")?;
                continue;
            }
            _ => {
                writeln!(out, "{HELP}")?;
                continue;
            }
        }
        show(&ex, lts, out)?;
    }
}
