//! Length-n words over small integer alphabets and their mixed-radix indexing.

/// A block of letters; for message sources a block is the single message index.
pub type Block = Vec<u32>;

/// Number of words of length `n` over `alphabet` letters, as a float so that
/// oversized spaces can be compared against caps without overflow.
pub fn space_size(alphabet: usize, n: usize) -> f64 {
    (alphabet as f64).powi(n as i32)
}

/// Lexicographic iterator over `alphabet^n` (first letter most significant).
#[derive(Debug, Clone)]
pub struct Words {
    alphabet: u32,
    current: Option<Block>,
}

impl Words {
    pub fn new(alphabet: usize, n: usize) -> Self {
        let current = if alphabet == 0 && n > 0 {
            None
        } else {
            Some(vec![0; n])
        };
        Self {
            alphabet: alphabet as u32,
            current,
        }
    }
}

impl Iterator for Words {
    type Item = Block;

    fn next(&mut self) -> Option<Block> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.alphabet {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// Mixed-radix index of a word (first letter most significant).
pub fn word_index(word: &[u32], alphabet: usize) -> u64 {
    word.iter()
        .fold(0u64, |acc, &s| acc * alphabet as u64 + s as u64)
}

pub fn word_from_index(mut index: u64, alphabet: usize, n: usize) -> Block {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % alphabet as u64) as u32;
        index /= alphabet as u64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_index_order() {
        let words: Vec<_> = Words::new(3, 2).collect();
        assert_eq!(words.len(), 9);
        for (i, w) in words.iter().enumerate() {
            assert_eq!(word_index(w, 3), i as u64);
            assert_eq!(&word_from_index(i as u64, 3, 2), w);
        }
    }

    #[test]
    fn empty_word() {
        assert_eq!(Words::new(2, 0).collect::<Vec<_>>(), vec![Vec::<u32>::new()]);
    }
}
