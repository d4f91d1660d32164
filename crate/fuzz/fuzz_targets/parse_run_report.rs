#![no_main]

use libfuzzer_sys::fuzz_target;
use steering::report::RunReport;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = RunReport::from_json_lines(text) {
        let emitted = report.to_json_lines().unwrap();
        assert_eq!(RunReport::from_json_lines(&emitted).unwrap(), report);
        let _ = report.csv_rows();
    }
});
