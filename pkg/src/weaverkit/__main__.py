from weaverkit.cli import main

raise SystemExit(main())
