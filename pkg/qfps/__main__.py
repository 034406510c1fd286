from qfps.cli import main

raise SystemExit(main())
