//! Terminal judge for lexicon expansion.

use std::io::{BufRead, Write};

use revrank_core::lexicon::{Candidate, Judge, Side, Verdict};

/// Asks about each candidate on `output` and reads one answer per line from
/// `input`: `a`ccept, `r`eject, `d`efer, `s`kip, `q`uit. After quit, or at
/// end of input, every remaining candidate is skipped.
pub struct PromptJudge<R, W> {
    input: R,
    output: W,
    done: bool,
}

impl<R: BufRead, W: Write> PromptJudge<R, W> {
    pub fn new(input: R, output: W) -> Self {
        PromptJudge { input, output, done: false }
    }

    fn ask(&mut self, c: &Candidate) -> Option<Verdict> {
        let side = match c.side {
            Side::Negative => "negative",
            Side::Positive => "positive",
        };
        loop {
            let _ = write!(
                self.output,
                "[{} {side}] {} ratio={:.3} (n_n={}, n_p={}) [a/r/d/s/q]? ",
                c.iteration, c.stats.word, c.ratio, c.stats.n_n, c.stats.n_p
            );
            let _ = self.output.flush();
            let mut line = String::new();
            match self.input.read_line(&mut line) {
                Ok(0) | Err(_) => return None,
                Ok(_) => {}
            }
            match line.trim().to_ascii_lowercase().as_str() {
                "a" | "accept" | "y" => return Some(Verdict::Accept),
                "r" | "reject" | "n" => return Some(Verdict::Reject),
                "d" | "defer" => return Some(Verdict::Defer),
                "s" | "skip" | "" => return Some(Verdict::Pass),
                "q" | "quit" => return None,
                other => {
                    let _ = writeln!(self.output, "unrecognised answer `{other}`");
                }
            }
        }
    }
}

impl<R: BufRead, W: Write> Judge for PromptJudge<R, W> {
    fn judge(&mut self, candidate: &Candidate) -> Verdict {
        if self.done {
            return Verdict::Pass;
        }
        match self.ask(candidate) {
            Some(v) => v,
            None => {
                self.done = true;
                Verdict::Pass
            }
        }
    }
}
