from src.frozen_er.cli import main

raise SystemExit(main())
