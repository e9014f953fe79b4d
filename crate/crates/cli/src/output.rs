use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Files staged in memory and committed together. Each file goes to a
/// temporary sibling first and is renamed into place, so a reader never
/// observes a half-written file.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.files.push((path, contents.into()));
    }

    pub fn commit(self) -> std::io::Result<Vec<PathBuf>> {
        let mut staged = Vec::new();
        for (path, bytes) in &self.files {
            match write_temp(path, bytes) {
                Ok(tmp) => staged.push((tmp, path.clone())),
                Err(e) => {
                    for (tmp, _) in staged {
                        let _ = fs::remove_file(tmp);
                    }
                    return Err(e);
                }
            }
        }
        let mut done = Vec::new();
        for (tmp, path) in staged {
            fs::rename(&tmp, &path)?;
            done.push(path);
        }
        Ok(done)
    }
}

fn write_temp(path: &Path, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    Ok(tmp)
}
